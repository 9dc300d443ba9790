#include "kmsspec/realizable.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kms::realizable {

using exprat::BigInt;

double mobius_eval(double a, double beta) {
    require(a > 1, ErrorKind::InvalidInput, "Mobius factor needs a > 1");
    require(std::isfinite(beta), ErrorKind::InvalidInput, "beta must be finite");
    return std::tanh(beta * std::log(a) / 2);
}

RatioBound ratio_bound_detail(double a_n, double a_next) {
    require(a_n > 1 && a_next > 1, ErrorKind::InvalidInput, "ratio bound needs bases > 1");
    const double al = std::log(a_n), ga = std::log(a_next);
    RatioBound rb;
    rb.limit_zero = al / ga;
    rb.limit_inf = 1.0;
    if (a_n == a_next) return rb;
    // The ratio is even in beta; bracket it on beta > 0 using that both tanh factors increase.
    const double b1 = 0.02 / std::max(al, ga);
    const double B = 24.0 / std::min(al, ga);
    const double y1 = b1 * ga / 2;
    rb.C = std::max(rb.limit_zero, 1.0);
    rb.C = std::max(rb.C, rb.limit_zero / (1.0 - y1 * y1 / 3.0));  // tanh y >= y (1 - y^2/3)
    const std::size_t cells = 20000;
    const double growth = std::pow(B / b1, 1.0 / static_cast<double>(cells));
    double lo = b1;
    for (std::size_t i = 0; i < cells; ++i) {
        const double hi = lo * growth;
        rb.C = std::max(rb.C, std::tanh(hi * al / 2) / std::tanh(lo * ga / 2));
        lo = hi;
    }
    rb.C = std::max(rb.C, 1.0 / std::tanh(B * ga / 2));
    rb.cells = cells + 2;
    return rb;
}

double Schedule::at(double a, int n) const {
    require(n >= 1, ErrorKind::InvalidInput, "schedule index is 1-based");
    require(a > 1, ErrorKind::InvalidInput, "schedule needs a > 1");
    if (kind == Geometric) {
        require(q > 0 && q < 1, ErrorKind::InvalidInput, "geometric schedule needs 0 < q < 1");
        return 1.0 + (a - 1.0) * std::pow(q, n - 1);
    }
    return 1.0 + (a - 1.0) / (static_cast<double>(n) * n);
}

double StageBlock::log_integral(double beta) const {
    if (factorized) return system.log_integral(beta);
    return std::log(conformal::integrate_potential(block, beta));
}

double StageBlock::zeta(double beta) const { return factorized ? system.zeta(beta) : 0.0; }

std::size_t StageBlock::cell_extent(std::size_t d) const {
    require(d < cell_rank(), ErrorKind::InvalidInput, "cell coordinate out of range");
    if (!factorized) return static_cast<std::size_t>(block.group.order);
    return d == 0 ? system.s1.classes.size() : system.s2.classes.size();
}

double StageBlock::log_cell_measure(double beta, const std::size_t* idx) const {
    for (std::size_t d = 0; d < cell_rank(); ++d)
        require(idx[d] < cell_extent(d), ErrorKind::InvalidInput, "cell index out of range");
    if (!factorized) return std::log(conformal::conformal_weights(block, beta)[idx[0]]);
    const auto& c1 = system.s1.classes[idx[0]];
    const auto& c2 = system.s2.classes[idx[1]];
    return system.s1.class_log_mult(idx[0]) + beta * c1.log_base - system.s1.log_total(beta) +
           system.s2.class_log_mult(idx[1]) + beta * c2.log_base - system.s2.log_total(beta);
}

double StageBlock::log_cell_potential(const std::size_t* idx) const {
    for (std::size_t d = 0; d < cell_rank(); ++d)
        require(idx[d] < cell_extent(d), ErrorKind::InvalidInput, "cell index out of range");
    if (!factorized) return std::log(block.potential[idx[0]]);
    using G = exprat::ClassSide::Group;
    const int g1 = system.s1.classes[idx[0]].group, g2 = system.s2.classes[idx[1]].group;
    const double lt = std::log(system.t);
    if (g1 == G::Num) return lt;
    if ((g1 == G::NumCopy && g2 != G::Rest) || (g1 == G::Rest && g2 == G::Num)) return -lt;
    return 0.0;
}

double RealizableCocycle::log_eval_phi(double beta) const {
    double s = 0;
    for (const auto& st : stages) s += st.log_integral(beta);
    return s;
}

double RealizableCocycle::eval_phi(double beta) const { return std::exp(log_eval_phi(beta)); }

double RealizableCocycle::eval_psi_fast(double beta, std::size_t stages_used) const {
    double p = 1.0;
    for (std::size_t k = 0; k < std::min(stages_used, stages.size()); ++k)
        p *= 1.0 + mobius_eval(stages[k].a, beta) * stages[k].zeta(beta);
    return p;
}

bool RealizableCocycle::all_bounds_hold() const {
    if (stages.empty() || stage_errors.size() != stages.size()) return false;
    for (std::size_t k = 0; k < stages.size(); ++k) {
        if (!(stage_errors[k] <= stage_bounds[k])) return false;
        if (!(min_factor[k] >= 0.5) || !(max_psi[k] <= 2.0)) return false;
    }
    return certified_error <= stage_bounds.back();
}

namespace {

// sup_{|beta| >= R} |zeta_k| for a realized stage with R >= its fit range: each eta is at most its g,
// and g decreases beyond the range because every kernel center lies inside it.
double stage_tail(const StageBlock& s, double R) {
    if (!s.factorized) return 0.0;
    if (R < s.R) return std::numeric_limits<double>::infinity();
    const auto& g1 = s.system.eta1.g;
    const auto& g2 = s.system.eta2.g;
    return std::max({g1.eval(R), g1.eval(-R), g2.eval(R), g2.eval(-R)});
}

StageBlock trivial_stage(int k, double a_k, double eps, double R, const exprat::JSeq& j, std::size_t idx) {
    StageBlock s;
    s.k = k;
    s.a = a_k;
    s.eps = eps;
    s.R = R;
    s.factorized = false;
    const int order = j.at(idx);
    require(order <= conformal::kMaxGroupOrder, ErrorKind::InvalidInput, "j_k exceeds the explicit group cap");
    s.block.group = conformal::FiniteGroupTable::cyclic(order);
    s.block.base_measure = conformal::ProbVector::uniform(static_cast<std::size_t>(order));
    s.block.potential.assign(static_cast<std::size_t>(order), 1.0);
    s.block.base_a = a_k;
    s.first_j = s.last_j = idx;
    return s;
}

}  // namespace

RealizableCocycle explicit_cocycle(const std::vector<conformal::FiniteConformalBlock>& blocks) {
    require(!blocks.empty(), ErrorKind::InvalidInput, "need at least one block");
    RealizableCocycle c;
    int k = 0;
    for (const auto& b : blocks) {
        b.validate();
        StageBlock s;
        s.k = ++k;
        s.a = b.base_a;
        s.factorized = false;
        s.block = b;
        s.first_j = s.last_j = static_cast<std::size_t>(k);
        c.stages.push_back(std::move(s));
        c.bases.push_back(b.base_a);
    }
    c.a = c.bases.front();
    return c;
}

RealizableCocycle build_realizable(const Fn& zeta, double a, const BuildOptions& opts) {
    require(opts.stages >= 1, ErrorKind::InvalidInput, "need at least one stage");
    require(a > 1, ErrorKind::InvalidInput, "need a > 1");
    require(opts.R > 0 && opts.grid_n >= 2, ErrorKind::InvalidInput, "need R > 0 and at least two grid points");
    RealizableCocycle out;
    out.a = a;
    out.R = opts.R;
    out.grid_n = opts.grid_n;
    for (int n = 1; n <= opts.stages + 1; ++n) out.bases.push_back(opts.schedule.at(a, n));

    const Fn phi = [zeta, a](double b) { return 1.0 + mobius_eval(a, b) * zeta(b); };
    auto zt = [&](double R) { return opts.zeta_tail ? opts.zeta_tail(R) : 0.0; };
    const auto cert_grid = linspace(-opts.R, opts.R, opts.grid_n);

    std::vector<double> ladder{opts.R};
    for (double r : opts.R_ladder)
        if (r > opts.R) ladder.push_back(r);
    std::sort(ladder.begin(), ladder.end());

    std::size_t next_j = 1;
    double R_prev = opts.R;
    for (int k = 1; k <= opts.stages; ++k) {
        const double a_k = out.bases[static_cast<std::size_t>(k - 1)];
        const double C_k = ratio_bound(a_k, out.bases[static_cast<std::size_t>(k)]);
        const double eps_k = std::min(1.0 / (4.0 * C_k), std::ldexp(1.0, -k));
        const std::size_t done = out.stages.size();

        auto raw = [&, a_k, done](double b) {
            const double psi = out.eval_psi_fast(b, done);
            return (phi(b) - psi) / (psi * mobius_eval(a_k, b));
        };
        constexpr double kNearZero = 1e-4;
        const double f_left = raw(-kNearZero), f_right = raw(kNearZero);
        Fn f_k = [raw, f_left, f_right](double b) {
            if (std::abs(b) < kNearZero) return f_left + (f_right - f_left) * (b + kNearZero) / (2 * kNearZero);
            return raw(b);
        };

        auto tail_psi = [&](double R) {
            double p = 1.0;
            for (const auto& s : out.stages) p *= 1.0 + stage_tail(s, R);
            return p - 1.0;
        };
        auto tail_f = [&](double R) {
            const double tp = tail_psi(R);
            if (!(tp < 1.0)) return std::numeric_limits<double>::infinity();
            return (zt(R) + tp) / ((1.0 - tp) * mobius_eval(a_k, R));
        };
        double R_k = -1, f_tail = 0;
        for (double r : ladder) {
            if (r < R_prev) continue;
            const double t = tail_f(r);
            if (t <= eps_k / 6) {
                R_k = r;
                f_tail = t;
                break;
            }
        }
        if (R_k < 0) {
            std::ostringstream os;
            os << "stage " << k << ": residual tail exceeds eps/6 = " << eps_k / 6 << " at every ladder radius";
            throw Error(ErrorKind::Realization, os.str());
        }

        double fmax = 0;
        for (double b : linspace(-R_k, R_k, opts.grid_n)) fmax = std::max(fmax, std::abs(f_k(b)));
        if (fmax > 0.5 + 1e-9) {
            std::ostringstream os;
            os << "stage " << k << ": residual leaves [-1/2, 1/2] (sup " << fmax << ")";
            throw Error(ErrorKind::Realization, os.str());
        }

        StageBlock st;
        if (fmax == 0.0 && f_tail == 0.0) {
            st = trivial_stage(k, a_k, eps_k, R_k, opts.j, next_j);
            next_j += 1;
        } else {
            exprat::RealizeOptions ro;
            ro.R = R_k;
            ro.f_tail = f_tail;
            ro.first_j = next_j;
            ro.fit = opts.fit;
            Fn clipped = [f_k](double b) { return std::clamp(f_k(b), -0.5, 0.5); };
            exprat::RealizeResult res;
            try {
                res = exprat::realize_block(clipped, a_k, eps_k, opts.j, ro);
            } catch (const Error& e) {
                std::ostringstream os;
                os << "stage " << k << ": " << e.what();
                throw Error(e.kind(), os.str());
            }
            st.k = k;
            st.a = a_k;
            st.eps = eps_k;
            st.R = R_k;
            st.factorized = true;
            st.system = std::move(res.system);
            st.fit_error_plus = res.fit_error_plus;
            st.fit_error_minus = res.fit_error_minus;
            st.approx_error = res.approx_error;
            st.first_j = next_j;
            st.last_j = res.n;
            next_j = res.n + 1;
        }
        st.C = C_k;
        st.f_tail = f_tail;
        out.stages.push_back(std::move(st));
        R_prev = R_k;

        const double Rc = std::max(opts.R, R_k);
        double min_factor = std::numeric_limits<double>::infinity(), max_psi = 0;
        const auto& cur = out.stages.back();
        for (double b : linspace(-Rc, Rc, opts.grid_n)) {
            min_factor = std::min(min_factor, 1.0 + mobius_eval(a_k, b) * cur.zeta(b));
            max_psi = std::max(max_psi, out.eval_psi_fast(b, out.stages.size()));
        }
        double err = 0;
        for (double b : cert_grid) err = std::max(err, std::abs(phi(b) - out.eval_psi_fast(b, out.stages.size())));
        out.min_factor.push_back(min_factor);
        out.max_psi.push_back(max_psi);
        out.stage_errors.push_back(err);
        out.stage_bounds.push_back(std::ldexp(1.0, 1 - k));
        if (min_factor < 0.5) {
            std::ostringstream os;
            os << "stage " << k << ": 1 + P zeta drops to " << min_factor << " < 1/2";
            throw Error(ErrorKind::Realization, os.str());
        }
    }

    // final comparison uses the realized measures, not the fast forms
    double err = 0, lerr = 0;
    for (double b : cert_grid) {
        const double lp = out.log_eval_phi(b);
        err = std::max(err, std::abs(phi(b) - std::exp(lp)));
        lerr = std::max(lerr, std::abs(std::log(phi(b)) - lp));
    }
    out.certified_error = err;
    out.tail_bound = lerr;
    return out;
}

nlohmann::json to_json(const StageBlock& s) {
    nlohmann::json j{{"k", s.k},
                     {"a", dec(s.a)},
                     {"C", dec(s.C)},
                     {"eps", dec(s.eps)},
                     {"R", dec(s.R)},
                     {"factorized", s.factorized},
                     {"fit_error_plus", dec(s.fit_error_plus)},
                     {"fit_error_minus", dec(s.fit_error_minus)},
                     {"approx_error", dec(s.approx_error)},
                     {"f_tail", dec(s.f_tail)},
                     {"first_j", s.first_j},
                     {"last_j", s.last_j}};
    if (s.factorized) {
        j["order"] = BigInt(s.system.s1.size * s.system.s2.size).str();
        j["system"] = exprat::to_json(s.system);
    } else {
        j["order"] = std::to_string(s.block.group.order);
        j["block"] = conformal::to_json(s.block);
    }
    return j;
}

StageBlock stage_from_json(const nlohmann::json& j) {
    StageBlock s;
    s.k = j.at("k").get<int>();
    s.a = parse_dec(j.at("a").get<std::string>());
    s.C = parse_dec(j.at("C").get<std::string>());
    s.eps = parse_dec(j.at("eps").get<std::string>());
    s.R = parse_dec(j.at("R").get<std::string>());
    s.factorized = j.at("factorized").get<bool>();
    s.fit_error_plus = parse_dec(j.at("fit_error_plus").get<std::string>());
    s.fit_error_minus = parse_dec(j.at("fit_error_minus").get<std::string>());
    s.approx_error = parse_dec(j.at("approx_error").get<std::string>());
    s.f_tail = parse_dec(j.at("f_tail").get<std::string>());
    s.first_j = j.at("first_j").get<std::size_t>();
    s.last_j = j.at("last_j").get<std::size_t>();
    if (s.factorized)
        s.system = exprat::block_system_from_json(j.at("system"));
    else
        s.block = conformal::block_from_json(j.at("block"));
    return s;
}

static nlohmann::json dec_array(const std::vector<double>& v) {
    auto a = nlohmann::json::array();
    for (double x : v) a.push_back(dec(x));
    return a;
}

static std::vector<double> dec_vector(const nlohmann::json& a) {
    std::vector<double> v;
    for (const auto& x : a) v.push_back(parse_dec(x.get<std::string>()));
    return v;
}

nlohmann::json to_json(const RealizableCocycle& c) {
    auto st = nlohmann::json::array();
    for (const auto& s : c.stages) st.push_back(to_json(s));
    return {{"a", dec(c.a)},
            {"R", dec(c.R)},
            {"grid_n", c.grid_n},
            {"bases", dec_array(c.bases)},
            {"stage_errors", dec_array(c.stage_errors)},
            {"stage_bounds", dec_array(c.stage_bounds)},
            {"min_factor", dec_array(c.min_factor)},
            {"max_psi", dec_array(c.max_psi)},
            {"certified_error", dec(c.certified_error)},
            {"tail_bound", dec(c.tail_bound)},
            {"stages", st}};
}

RealizableCocycle cocycle_from_json(const nlohmann::json& j) {
    RealizableCocycle c;
    c.a = parse_dec(j.at("a").get<std::string>());
    c.R = parse_dec(j.at("R").get<std::string>());
    c.grid_n = j.at("grid_n").get<std::size_t>();
    c.bases = dec_vector(j.at("bases"));
    c.stage_errors = dec_vector(j.at("stage_errors"));
    c.stage_bounds = dec_vector(j.at("stage_bounds"));
    c.min_factor = dec_vector(j.at("min_factor"));
    c.max_psi = dec_vector(j.at("max_psi"));
    c.certified_error = parse_dec(j.at("certified_error").get<std::string>());
    c.tail_bound = parse_dec(j.at("tail_bound").get<std::string>());
    for (const auto& s : j.at("stages")) c.stages.push_back(stage_from_json(s));
    return c;
}

// ---- fraction pair ---------------------------------------------------------

double clamp_fold(double t) {
    const double at = std::abs(t);
    if (at <= 0.5) return t;
    if (at >= 1.0) return 0.0;
    return t > 0 ? 1.0 - t : -1.0 - t;
}

double FractionPair::bump(double beta) const { return std::max(0.0, 1.0 - K.distance(beta)); }

namespace {

struct Logs {
    double la, lb, lc;
    double l2k1;  // ln 2(k-1)
    double lrest; // ln (l - l/k), -inf when l = 0
    double ll;    // ln l
    double llk;   // ln (l/k)
    double lk;    // ln k
};

Logs logs_of(const FractionPair& p) {
    const double l = p.l;
    return {std::log(p.a),
            std::log(p.b),
            std::log(p.c),
            std::log(2.0 * (p.k - 1)),
            p.l > 0 ? std::log(l - l / p.k) : kNegInf,
            p.l > 0 ? std::log(l) : kNegInf,
            p.l > 0 ? std::log(l / p.k) : kNegInf,
            std::log(static_cast<double>(p.k))};
}

// ln(2(k-1) b^beta + (l - l/k) c^beta)
double log_excess(const Logs& g, double beta) {
    return log_sum_exp({g.l2k1 + beta * g.lb, g.lrest + beta * g.lc});
}

// ln(1 + 2(k-1) b^beta + a^beta + l c^beta)
double log_big(const Logs& g, double beta) {
    return log_sum_exp({0.0, g.l2k1 + beta * g.lb, beta * g.la, g.ll + beta * g.lc});
}

// ln(k + k a^beta + l c^beta)
double log_small(const Logs& g, double beta) {
    return log_sum_exp({g.lk, g.lk + beta * g.la, g.ll + beta * g.lc});
}

}  // namespace

double FractionPair::Q(int which, double beta) const {
    require(which == 1 || which == 2, ErrorKind::InvalidInput, "fraction index must be 1 or 2");
    require(beta != 0.0, ErrorKind::Domain, "Q is singular at beta = 0");
    const Logs g = logs_of(*this);
    const double inv_P = 1.0 / P(beta);
    if (which == 1) return -std::exp(log_excess(g, beta) - log_big(g, beta)) * inv_P;
    const double den = log_sum_exp({0.0, beta * g.la, g.llk + beta * g.lc});
    return std::exp(log_excess(g, beta) - den) * inv_P;
}

double FractionPair::zeta(int which, double beta) const {
    if (beta == 0.0) return 0.0;
    const double bp = bump(beta);
    if (bp == 0.0) return 0.0;
    return clamp_fold(Q(which, beta)) * bp;
}

double FractionPair::condition_defect(int which, double beta) const {
    if (beta == 0.0) return -1.0;
    const double q = Q(which, beta);
    // F(q) = q on [-1/2, 1/2]; dividing it out analytically keeps tiny q harmless
    const double fold = std::abs(q) <= 0.5 ? 1.0 : clamp_fold(q) / q;
    return fold * bump(beta) - 1.0;
}

double FractionPair::log_prefactor(int which, double beta) const {
    const Logs g = logs_of(*this);
    const double r = log_big(g, beta) - log_small(g, beta);
    return which == 1 ? r : -r;
}

double FractionPair::phi(int which, double beta) const {
    return std::exp(log_prefactor(which, beta)) * (1.0 + P(beta) * zeta(which, beta));
}

conformal::FiniteConformalBlock FractionPair::prefactor_block(int which) const {
    require(which == 1 || which == 2, ErrorKind::InvalidInput, "fraction index must be 1 or 2");
    std::vector<double> w, H;
    auto push = [&](int times, double wt, double h) {
        for (int i = 0; i < times; ++i) {
            w.push_back(wt);
            H.push_back(h);
        }
    };
    push(1, 1.0, 1.0);
    push(1, a, 1.0);
    if (which == 1) {
        push(k - 1, 1.0, b);
        push(k - 1, a, b / a);
    } else {
        push(k - 1, b, 1.0 / b);
        push(k - 1, b, a / b);
    }
    push(l, c, 1.0);
    double total = 0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    conformal::FiniteConformalBlock blk;
    blk.group = conformal::FiniteGroupTable::cyclic(lambda0_order);
    blk.base_measure = conformal::ProbVector(w);
    blk.potential = H;
    double top = 1.0;
    for (double h : H) top = std::max({top, h, 1.0 / h});
    blk.base_a = top;
    return blk;
}

FractionChecks FractionPair::check(double R, std::size_t grid_n) const {
    FractionChecks res;
    const double rest = l - static_cast<double>(l) / k;
    res.b_inequality = (2.0 * (k - 1) + rest) * std::pow(b, -delta) <= 0.25;
    res.a_inequality = 2.0 * (k - 1) * std::pow(b / a, delta) + rest * std::pow(c / a, delta) <= 0.25;
    const double ad = std::pow(a, delta);
    res.a_delta = (ad + 1) / (ad - 1) <= 2.0;
    res.q_bound = true;
    for (double beta : linspace(-R, R, grid_n)) {
        if (beta == 0.0) continue;
        if (beta <= -delta) res.b_inequality = res.b_inequality && (2.0 * (k - 1) + rest) * std::pow(b, beta) <= 0.25;
        if (beta >= delta)
            res.a_inequality = res.a_inequality &&
                             2.0 * (k - 1) * std::pow(b / a, beta) + rest * std::pow(c / a, beta) <= 0.25;
        if (std::abs(beta) >= delta)
            res.q_bound = res.q_bound && std::abs(Q(1, beta)) <= 0.5 + 1e-12 && std::abs(Q(2, beta)) <= 0.5 + 1e-12;
        else if (beta > 0 && std::abs(Q(1, beta)) > 0.5)
            res.clamp_exercised = true;
    }
    res.phi1_at_zero = phi(1, 0.0);
    res.phi2_at_zero = phi(2, 0.0);
    return res;
}

FractionPair fraction_pair(const spectra::ClosedSetSpec& K, int k, int lambda0_order) {
    require(k >= 2, ErrorKind::InvalidInput, "fraction pair needs k >= 2");
    require(lambda0_order >= 2 * k, ErrorKind::InvalidInput, "Lambda0_order must be at least 2k");
    require(lambda0_order <= conformal::kMaxGroupOrder, ErrorKind::InvalidInput, "Lambda0_order exceeds 64");
    const double d0 = K.distance(0.0);
    require(d0 > 0, ErrorKind::Domain, "fraction pair needs 0 outside K");
    FractionPair p;
    p.K = K;
    p.k = k;
    p.lambda0_order = lambda0_order;
    p.l = lambda0_order - 2 * k;
    p.delta = std::isfinite(d0) ? d0 / 2 : 1.0;
    const double rest = p.l - static_cast<double>(p.l) / k;

    double b = 2;
    while ((2.0 * (k - 1) + rest) * std::pow(b, -p.delta) > 0.25) {
        b *= 2;
        if (b > kBaseCeiling)
            throw Error(ErrorKind::Construction, "no admissible b below the ceiling: the beta <= -delta bound fails");
    }
    const double c = b + 1;
    double a = c + 1;
    for (;;) {
        const bool ineq = 2.0 * (k - 1) * std::pow(b / a, p.delta) + rest * std::pow(c / a, p.delta) <= 0.25;
        const bool gap = std::pow(a, p.delta) >= 3.0;
        if (ineq && gap) break;
        a *= 2;
        if (a > kBaseCeiling)
            throw Error(ErrorKind::Construction,
                        std::string("no admissible a below the ceiling: ") +
                            (!ineq ? "the beta >= delta bound fails" : "(a^delta + 1)/(a^delta - 1) <= 2 fails"));
    }
    p.a = a;
    p.b = b;
    p.c = c;
    return p;
}

nlohmann::json to_json(const FractionPair& p) {
    return {{"K", spectra::to_json(p.K)}, {"k", p.k}, {"l", p.l}, {"lambda0_order", p.lambda0_order},
            {"delta", dec(p.delta)},      {"a", dec(p.a)}, {"b", dec(p.b)}, {"c", dec(p.c)}};
}

}  // namespace kms::realizable
