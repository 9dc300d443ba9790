#include "kmsspec/exprational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "kmsspec/lp.hpp"

namespace kms::exprat {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;
constexpr double kLn10 = 2.302585092994045684017991454684364208;

double big_log(const BigInt& x) {
    if (x <= 0) return kNegInf;
    const unsigned msb = boost::multiprecision::msb(x);
    if (msb < 60) return std::log(x.convert_to<double>());
    const unsigned shift = msb - 60;
    BigInt top = x >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * kLn2;
}

// "d.dddde+N" for e^lg, readable even when lg is far outside double range.
std::string log_to_decimal(double lg) {
    if (lg == kNegInf) return "0";
    double e10 = std::floor(lg / kLn10);
    double mant = std::exp(lg - e10 * kLn10);
    if (mant >= 10.0) {
        mant /= 10.0;
        e10 += 1.0;
    }
    std::ostringstream os;
    os.precision(17);
    os << mant << "e" << (e10 >= 0 ? "+" : "") << static_cast<long long>(e10);
    return os.str();
}

double lchoose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log(cosh(x ln 2))
double log_cosh2(double x) {
    const double ax = std::abs(x) * kLn2;
    return ax + std::log1p(std::exp(-2.0 * ax)) - kLn2;
}

double sigma_of(int n) { return 1.0 / (kLn2 * std::sqrt(static_cast<double>(n))); }
double spacing_of(int n) { return 1.0 / std::sqrt(static_cast<double>(n)); }
// |x| beyond which cosh(x ln2)^{-n} < 1e-15
double support_of(int n) { return (15.0 * std::log(10.0) / n + kLn2) / kLn2; }

}  // namespace

double log_sum_terms(const std::vector<Term>& terms, double beta) {
    LogSum s;
    for (const auto& t : terms) s.add(t.log_coef + beta * t.log_base);
    return s.value();
}

ExpSumRatio::ExpSumRatio(std::vector<Term> numer, std::vector<Term> denom)
    : numer_(std::move(numer)), denom_(std::move(denom)) {
    require(!numer_.empty() && !denom_.empty(), ErrorKind::InvalidInput, "ratio needs terms on both sides");
    auto check = [](const std::vector<Term>& ts) {
        for (const auto& t : ts)
            require(std::isfinite(t.log_coef) && std::isfinite(t.log_base), ErrorKind::InvalidInput,
                    "coefficients and bases must be positive and finite");
    };
    check(numer_);
    check(denom_);
    auto [nlo, nhi] = std::minmax_element(numer_.begin(), numer_.end(),
                                          [](const Term& a, const Term& b) { return a.log_base < b.log_base; });
    auto [dlo, dhi] = std::minmax_element(denom_.begin(), denom_.end(),
                                          [](const Term& a, const Term& b) { return a.log_base < b.log_base; });
    require(dhi->log_base > nhi->log_base && dlo->log_base < nlo->log_base, ErrorKind::InvalidInput,
            "denominator bases must strictly dominate the numerator bases on both sides");
}

ExpSumRatio ExpSumRatio::from_values(const std::vector<std::pair<double, double>>& numer,
                                     const std::vector<std::pair<double, double>>& denom) {
    auto conv = [](const std::vector<std::pair<double, double>>& v) {
        std::vector<Term> out;
        for (auto [c, a] : v) {
            require(c > 0 && a > 0, ErrorKind::InvalidInput, "coefficients and bases must be positive");
            out.push_back({std::log(c), std::log(a)});
        }
        return out;
    };
    return ExpSumRatio(conv(numer), conv(denom));
}

double ExpSumRatio::log_eval(double beta) const {
    return log_sum_terms(numer_, beta) - log_sum_terms(denom_, beta);
}

double ExpSumRatio::eval(double beta) const { return std::exp(log_eval(beta)); }

ExpSumRatio ExpSumRatio::reflected() const {
    auto flip = [](std::vector<Term> v) {
        for (auto& t : v) t.log_base = -t.log_base;
        return v;
    };
    return ExpSumRatio(flip(numer_), flip(denom_));
}

static nlohmann::json terms_json(const std::vector<Term>& ts) {
    auto arr = nlohmann::json::array();
    for (const auto& t : ts)
        arr.push_back({{"coef", log_to_decimal(t.log_coef)},
                       {"base", log_to_decimal(t.log_base)},
                       {"log_coef", dec(t.log_coef)},
                       {"log_base", dec(t.log_base)}});
    return arr;
}

static std::vector<Term> terms_from(const nlohmann::json& arr) {
    std::vector<Term> out;
    for (const auto& t : arr)
        out.push_back({parse_dec(t.at("log_coef").get<std::string>()), parse_dec(t.at("log_base").get<std::string>())});
    return out;
}

nlohmann::json to_json(const ExpSumRatio& r) {
    return {{"numer", terms_json(r.numer())}, {"denom", terms_json(r.denom())}};
}

ExpSumRatio ratio_from_json(const nlohmann::json& j) {
    return ExpSumRatio(terms_from(j.at("numer")), terms_from(j.at("denom")));
}

// ---- approximate unit ------------------------------------------------------

double log_cosh_kernel(int n, double x) { return -n * log_cosh2(x); }

double ApproxUnit::D() const { return std::exp(log_D); }

double ApproxUnit::operator()(double x) const {
    const double ax = std::abs(x) * kLn2;
    return std::exp(-n * (ax + std::log1p(std::exp(-2.0 * ax))) - log_D);
}

ApproxUnit approximate_unit(int n) {
    require(n >= 1, ErrorKind::InvalidInput, "approximate unit needs n >= 1");
    gsl_set_error_handler_off();
    struct P {
        int n;
    } par{n};
    gsl_function F;
    F.function = [](double x, void* p) { return std::exp(log_cosh_kernel(static_cast<P*>(p)->n, x)); };
    F.params = &par;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    double result = 0, abserr = 0;
    const int status = gsl_integration_qagi(&F, 0.0, 1e-13, 2000, ws, &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS || !(result > 0) || abserr > 1e-10 * result) {
        std::ostringstream os;
        os << "quadrature for D_" << n << " did not converge (" << gsl_strerror(status) << ", estimate " << result
           << ", abs error " << abserr << ")";
        throw Error(ErrorKind::Numeric, os.str());
    }
    ApproxUnit u;
    u.n = n;
    // (2^x + 2^-x)^{-n} = 2^{-n} cosh(x ln2)^{-n}
    u.log_D = std::log(result) - n * kLn2;
    u.quad_error = abserr / result;
    return u;
}

// ---- kernel sums -----------------------------------------------------------

double KernelSum::eval(double beta) const {
    double s = 0;
    for (const auto& k : terms) s += k.weight * std::exp(log_cosh_kernel(k.n, beta - k.center));
    return s;
}

double KernelSum::derivative_bound(double beta, double half) const {
    double s = 0;
    for (const auto& k : terms) {
        // |k'| = n ln2 |tanh| cosh^{-n}; tanh grows and cosh^{-n} decays with the distance
        const double dist = std::abs(beta - k.center);
        const double near = std::max(0.0, dist - half);
        s += k.weight * k.n * kLn2 * std::tanh((dist + half) * kLn2) * std::exp(log_cosh_kernel(k.n, near));
    }
    return s;
}

double KernelSum::log_common_denominator(double beta) const {
    double s = 0;
    for (const auto& k : terms) {
        const double x = 2.0 * beta * kLn2, y = 2.0 * k.center * kLn2;
        s += k.n * (std::max(x, y) + std::log1p(std::exp(-std::abs(x - y))));
    }
    return s;
}

int KernelSum::max_n() const {
    int m = 0;
    for (const auto& k : terms) m = std::max(m, k.n);
    return m;
}

long KernelSum::total_degree() const {
    long s = 0;
    for (const auto& k : terms) s += k.n;
    return s;
}

namespace {

using LogPoly = std::vector<double>;  // index = power of u = 2^beta

LogPoly log_conv(const LogPoly& a, const LogPoly& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<LogSum> acc(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == kNegInf) continue;
        for (std::size_t k = 0; k < b.size(); ++k)
            if (b[k] != kNegInf) acc[i + k].add(a[i] + b[k]);
    }
    LogPoly out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
    return out;
}

LogPoly log_add(const LogPoly& a, const LogPoly& b) {
    LogPoly out(std::max(a.size(), b.size()), kNegInf);
    for (std::size_t i = 0; i < out.size(); ++i) {
        LogSum s;
        if (i < a.size()) s.add(a[i]);
        if (i < b.size()) s.add(b[i]);
        out[i] = s.value();
    }
    return out;
}

std::vector<Term> poly_terms(const LogPoly& p) {
    std::vector<Term> out;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != kNegInf) out.push_back({p[i], static_cast<double>(i) * kLn2});
    return out;
}

}  // namespace

// w cosh((b-y)ln2)^{-n} = w 2^n (uY)^n / (u^2 + Y^2)^n with u = 2^b, Y = 2^y.
ExpSumRatio KernelSum::expand() const {
    require(!terms.empty(), ErrorKind::InvalidInput, "cannot expand an empty kernel sum");
    LogPoly N, D{0.0};
    for (const auto& k : terms) {
        require(k.weight > 0, ErrorKind::InvalidInput, "kernel weights must be positive");
        LogPoly den(2 * static_cast<std::size_t>(k.n) + 1, kNegInf);
        for (int i = 0; i <= k.n; ++i) den[2 * i] = lchoose(k.n, i) + 2.0 * (k.n - i) * k.center * kLn2;
        LogPoly lift(static_cast<std::size_t>(k.n) + 1, kNegInf);
        lift[k.n] = std::log(k.weight) + k.n * kLn2 + k.n * k.center * kLn2;
        LogPoly nd = log_conv(D, lift);
        N = N.empty() ? nd : log_add(log_conv(N, den), nd);
        D = log_conv(D, den);
    }
    return ExpSumRatio(poly_terms(N), poly_terms(D));
}

nlohmann::json to_json(const KernelSum& k) {
    auto arr = nlohmann::json::array();
    for (const auto& t : k.terms) arr.push_back({{"n", t.n}, {"center", dec(t.center)}, {"weight", dec(t.weight)}});
    return arr;
}

KernelSum kernels_from_json(const nlohmann::json& j) {
    KernelSum k;
    for (const auto& t : j)
        k.terms.push_back({t.at("n").get<int>(), parse_dec(t.at("center").get<std::string>()),
                           parse_dec(t.at("weight").get<std::string>())});
    return k;
}

// ---- fitter ----------------------------------------------------------------

namespace {

struct Dictionary {
    std::vector<Kernel> atoms;  // weight unused
};

std::vector<double> lattice(double R, double step) {
    std::vector<double> out;
    const long m = static_cast<long>(std::floor(R / step + 1e-9));
    for (long i = -m; i <= m; ++i) out.push_back(static_cast<double>(i) * step);
    return out;
}

// Smoothing error |phi_n * f - f| on grid points, f sampled on the same spacing beyond the range.
std::vector<double> smoothing_error(const Fn& f, const std::vector<double>& grid, double h, int n) {
    const ApproxUnit u = approximate_unit(n);
    const double w = support_of(n);
    const long reach = static_cast<long>(std::ceil(w / h));
    const long G = static_cast<long>(grid.size());
    std::vector<double> ext(static_cast<std::size_t>(G + 2 * reach));
    for (long i = 0; i < G + 2 * reach; ++i) {
        const long gi = i - reach;
        double x = (gi >= 0 && gi < G) ? grid[static_cast<std::size_t>(gi)] : grid[0] + h * static_cast<double>(gi);
        ext[static_cast<std::size_t>(i)] = std::max(0.0, f(x));
    }
    std::vector<double> ker(static_cast<std::size_t>(2 * reach + 1));
    for (long d = -reach; d <= reach; ++d) ker[static_cast<std::size_t>(d + reach)] = u(h * static_cast<double>(d)) * h;
    std::vector<double> err(grid.size());
    for (long i = 0; i < G; ++i) {
        double s = 0;
        for (long d = -reach; d <= reach; ++d)
            s += ker[static_cast<std::size_t>(d + reach)] * ext[static_cast<std::size_t>(i + reach + d)];
        err[static_cast<std::size_t>(i)] = std::abs(s - ext[static_cast<std::size_t>(i + reach)]);
    }
    return err;
}

Dictionary build_dictionary(const Fn& f, const std::vector<double>& grid, double h, double R,
                            const std::vector<int>& levels, double threshold) {
    Dictionary dict;
    std::vector<int> lv = levels;
    std::sort(lv.begin(), lv.end());
    for (double y : lattice(R, spacing_of(lv[0]))) dict.atoms.push_back({lv[0], y, 0.0});
    for (std::size_t li = 0; li + 1 < lv.size(); ++li) {
        const auto err = smoothing_error(f, grid, h, lv[li]);
        std::vector<double> flagged;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (err[i] > threshold) flagged.push_back(grid[i]);
        if (flagged.empty()) break;
        const double reach = 2.0 * sigma_of(lv[li]);
        for (double y : lattice(R, spacing_of(lv[li + 1]))) {
            auto it = std::lower_bound(flagged.begin(), flagged.end(), y - reach);
            if (it != flagged.end() && *it <= y + reach) dict.atoms.push_back({lv[li + 1], y, 0.0});
        }
    }
    return dict;
}

struct Certificate {
    double grid_error = 0, slack = 0, certified_grid = 0, tail = 0;
    std::size_t points = 0;
    std::vector<std::pair<double, double>> violators;  // (beta, f) at local maxima of the error above the cut
};

Certificate certify(const KernelSum& r, const FitTarget& target, double R, double h, double cut) {
    Certificate c;
    const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * R / h)) + 1;
    const auto xs = linspace(-R, R, n);
    const double step = xs.size() > 1 ? xs[1] - xs[0] : 0.0;
    std::vector<double> fv(n), err(n);
    for (std::size_t i = 0; i < n; ++i) fv[i] = std::max(0.0, target.f(xs[i]));
    c.points = n;
    for (std::size_t i = 0; i < n; ++i) {
        err[i] = std::abs(r.eval(xs[i]) - fv[i]);
        double lf = 0;
        if (i > 0) lf = std::max(lf, std::abs(fv[i] - fv[i - 1]) / step);
        if (i + 1 < n) lf = std::max(lf, std::abs(fv[i + 1] - fv[i]) / step);
        const double slack = (r.derivative_bound(xs[i], step / 2) + 2.0 * lf) * step / 2;
        c.grid_error = std::max(c.grid_error, err[i]);
        c.slack = std::max(c.slack, slack);
        c.certified_grid = std::max(c.certified_grid, err[i] + slack);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (err[i] <= cut) continue;
        if ((i > 0 && err[i - 1] > err[i]) || (i + 1 < n && err[i + 1] > err[i])) continue;
        c.violators.push_back({xs[i], fv[i]});
    }
    // every center lies in [-R, R], so r decreases beyond the range
    c.tail = std::max({r.eval(R), r.eval(-R), target.tail_bound});
    return c;
}

struct Grid {
    std::vector<double> x, f;  // uniform nodes
    std::vector<std::pair<double, double>> extra;  // exchange points added after failed certificates
    double h = 0, fmax = 0;
};

Grid fit_grid(const FitTarget& target, const FitOptions& opts, int finest) {
    Grid g;
    const std::size_t n = opts.grid_n ? opts.grid_n
                                      : static_cast<std::size_t>(
                                            std::ceil(2.0 * opts.R / std::min(0.025, sigma_of(finest) / 6))) + 1;
    g.x = linspace(-opts.R, opts.R, n);
    g.h = g.x[1] - g.x[0];
    g.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.f[i] = std::max(0.0, target.f(g.x[i]));
        require(std::isfinite(g.f[i]), ErrorKind::InvalidInput, "target is not finite on the fit grid");
        g.fmax = std::max(g.fmax, g.f[i]);
    }
    return g;
}

constexpr int kFinestLevel = 4096;

}  // namespace

FitResult fit_c0(const FitTarget& target, const FitOptions& opts, bool expand) {
    require(opts.eps > 0 && opts.R > 0, ErrorKind::InvalidInput, "fit needs eps > 0 and R > 0");
    require(!opts.levels.empty(), ErrorKind::InvalidInput, "fit needs at least one kernel level");
    for (int n : opts.levels) require(n >= 1, ErrorKind::InvalidInput, "kernel levels must be >= 1");
    require(target.tail_bound <= opts.eps, ErrorKind::FitFailure,
            "target tail beyond the fit range exceeds eps; enlarge R");
    std::vector<int> levels = opts.levels;
    std::sort(levels.begin(), levels.end());
    Grid grid = fit_grid(target, opts, levels.back());

    FitResult best;
    best.certified_error = std::numeric_limits<double>::infinity();

    if (grid.fmax == 0.0 && target.tail_bound == 0.0) {
        best.kernels.terms.push_back({levels.front(), 0.0, opts.eps * 1e-3});
    } else {
        double tau = opts.margin * opts.eps;
        double threshold = 0.3 * tau;
        double cert_h = grid.h / 10;
        bool lowered = false;
        for (int round = 0; round < opts.budget; ++round) {
            best.rounds = round + 1;
            Dictionary dict = build_dictionary(target.f, grid.x, grid.h, opts.R, levels, threshold);
            std::vector<double> xs = grid.x, fs = grid.f;
            for (auto [x, f] : grid.extra) {
                xs.push_back(x);
                fs.push_back(f);
            }
            const std::size_t rows = xs.size();
            lp::SparseRows A;
            A.cols = dict.atoms.size();
            A.rows.resize(rows);
            std::vector<double> lo(rows), hi(rows), cost(A.cols);
            for (std::size_t j = 0; j < A.cols; ++j) cost[j] = dict.atoms[j].n;
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < A.cols; ++j) {
                    const auto& a = dict.atoms[j];
                    if (std::abs(xs[i] - a.center) > support_of(a.n)) continue;
                    A.rows[i].push_back({static_cast<int>(j), std::exp(log_cosh_kernel(a.n, xs[i] - a.center))});
                }
                lo[i] = fs[i] - tau;
                hi[i] = fs[i] + tau;
            }
            // keep r small at the range ends so the tail comparison closes
            const std::size_t last = grid.x.size() - 1;
            hi[0] = std::min(hi[0], std::max(tau, fs[0]));
            hi[last] = std::min(hi[last], std::max(tau, fs[last]));
            auto sol = lp::solve_tube(A, lo, hi, cost);
            // only feasibility matters here; the certificate below is the judge
            if (!sol.converged && sol.primal_residual > 1e-8) {
                // infeasible tube: first widen the finer levels, then add a finer one
                if (!lowered) {
                    threshold *= 0.3;
                    lowered = true;
                } else if (levels.back() < kFinestLevel) {
                    levels.push_back(levels.back() * 4);
                    grid = fit_grid(target, opts, levels.back());
                    cert_h = std::min(cert_h, grid.h / 10);
                    lowered = false;
                }
                continue;
            }
            KernelSum ks;
            const double wmax = *std::max_element(sol.x.begin(), sol.x.end());
            for (std::size_t j = 0; j < A.cols; ++j)
                if (sol.x[j] > 1e-12 * wmax && sol.x[j] > 1e-15)
                    ks.terms.push_back({dict.atoms[j].n, dict.atoms[j].center, sol.x[j]});
            if (ks.terms.empty()) ks.terms.push_back({levels.front(), 0.0, opts.eps * 1e-3});
            Certificate c = certify(ks, target, opts.R, cert_h, tau);
            const double certified = std::max(c.certified_grid, c.tail);
            if (certified < best.certified_error) {
                best.kernels = ks;
                best.grid_error = c.grid_error;
                best.lipschitz_slack = c.slack;
                best.tail_error_bound = c.tail;
                best.certified_error = certified;
                best.dictionary_size = dict.atoms.size();
                best.certification_points = c.points;
            }
            if (certified <= opts.eps) break;
            if (c.slack > 0.1 * opts.eps) cert_h /= 2;
            if (c.violators.empty() || c.grid_error + c.slack > opts.eps) tau *= 0.9;
            grid.extra.insert(grid.extra.end(), c.violators.begin(), c.violators.end());
        }
    }
    if (best.certification_points == 0 && !best.kernels.terms.empty()) {
        Certificate c = certify(best.kernels, target, opts.R, grid.h / 10, opts.eps);
        best.grid_error = c.grid_error;
        best.lipschitz_slack = c.slack;
        best.tail_error_bound = c.tail;
        best.certified_error = std::max(c.certified_grid, c.tail);
        best.certification_points = c.points;
    }
    best.tail_certified = best.tail_error_bound <= opts.eps;
    if (!(best.certified_error <= opts.eps)) {
        std::ostringstream os;
        os << "no certificate within budget: best certified error " << best.certified_error << " > eps " << opts.eps;
        throw Error(ErrorKind::FitFailure, os.str());
    }
    if (expand) best.r = best.kernels.expand();
    return best;
}

// ---- integer bookkeeping ---------------------------------------------------

int JSeq::at(std::size_t k) const {
    require(k >= 1, ErrorKind::InvalidInput, "j sequence is 1-based");
    return k <= head.size() ? head[k - 1] : tail;
}

double JSeq::log_product(std::size_t from, std::size_t to) const {
    double s = 0;
    const std::size_t h_end = std::min(to, head.size());
    for (std::size_t k = from; k <= h_end; ++k) s += std::log(static_cast<double>(head[k - 1]));
    const std::size_t tail_from = std::max(from, head.size() + 1);
    if (to >= tail_from) s += static_cast<double>(to - tail_from + 1) * std::log(static_cast<double>(tail));
    return s;
}

BigInt JSeq::product(std::size_t from, std::size_t to) const {
    BigInt p = 1;
    const std::size_t h_end = std::min(to, head.size());
    for (std::size_t k = from; k <= h_end; ++k) p *= head[k - 1];
    const std::size_t tail_from = std::max(from, head.size() + 1);
    if (to >= tail_from) p *= boost::multiprecision::pow(BigInt(tail), static_cast<unsigned>(to - tail_from + 1));
    return p;
}

double Mult::log() const { return std::log(static_cast<double>(m)) + static_cast<double>(e) * kLn2; }

BigInt Mult::value() const { return BigInt(m) << static_cast<unsigned>(e); }

std::string Mult::str() const { return std::to_string(m) + "*2^" + std::to_string(e); }

Mult Mult::from_log(double lg) {
    const double l2 = lg / kLn2;
    Mult r;
    if (l2 < 62) {
        r.m = static_cast<std::uint64_t>(std::llround(std::exp(lg)));
        r.e = 0;
    } else {
        r.e = static_cast<std::int64_t>(std::floor(l2)) - 52;
        r.m = static_cast<std::uint64_t>(std::llround(std::exp2(l2 - static_cast<double>(r.e))));
    }
    if (r.m == 0) r.m = 1;
    return r;
}

double ClassSide::log_factor(int f) const { return big_log(factors[static_cast<std::size_t>(f)]); }

double ClassSide::class_log_mult(std::size_t i) const {
    const auto& c = classes[i];
    return log_factor(c.factor) + c.mult.log();
}

std::array<double, 3> ClassSide::log_group_sums(double beta) const {
    std::vector<double> lf(factors.size());
    for (std::size_t f = 0; f < factors.size(); ++f) lf[f] = big_log(factors[f]);
    std::array<LogSum, 3> acc;
    for (const auto& c : classes)
        acc[static_cast<std::size_t>(c.group)].add(lf[static_cast<std::size_t>(c.factor)] + c.mult.log() +
                                                   beta * c.log_base);
    return {acc[0].value(), acc[1].value(), acc[2].value()};
}

double ClassSide::log_group_sum(int group, double beta) const {
    require(group >= 0 && group < 3, ErrorKind::InvalidInput, "group index must be 0, 1 or 2");
    return log_group_sums(beta)[static_cast<std::size_t>(group)];
}

double ClassSide::log_total(double beta) const {
    const auto g = log_group_sums(beta);
    return log_sum_exp({g[0], g[1], g[2]});
}

BigInt ClassSide::exact_count() const {
    std::vector<BigInt> per(factors.size());
    for (const auto& c : classes) per[static_cast<std::size_t>(c.factor)] += c.mult.value();
    BigInt total = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) total += factors[f] * per[f];
    return total;
}

double EtaEval::eval_unperturbed(double beta) const {
    const double gv = g.eval(beta);
    return gv / (1.0 + 2.0 * gv);
}

double EtaEval::eval(double beta) const {
    const double gv = g.eval(beta);
    double extra = 0;
    if (log_TK != kNegInf)
        extra = std::exp(log_TK - log_S - g.log_common_denominator(beta) - log1p_exp(beta * log_t));
    return gv / (1.0 + 2.0 * gv + extra);
}

double PartitionedBlockSystem::log_size() const { return big_log(s1.size) + big_log(s2.size); }

PartitionedBlockSystem::Sums PartitionedBlockSystem::sums(double beta) const {
    const auto l = s1.log_group_sums(beta);
    const auto r = s2.log_group_sums(beta);
    const double a1 = l[0], a2 = l[1], b1 = l[2], c1 = r[0], c2 = r[1], d2 = r[2];
    Sums out;
    out.part[0] = a1 + log_sum_exp({c1, c2, d2});
    out.part[1] = log_sum_exp({a2 + c1, a2 + c2, b1 + c1});
    out.part[2] = log_sum_exp({a2 + d2, b1 + c2, b1 + d2});
    out.total = log_sum_exp({a1, a2, b1}) + log_sum_exp({c1, c2, d2});
    return out;
}

double PartitionedBlockSystem::log_total(double beta) const { return sums(beta).total; }

double PartitionedBlockSystem::log_part_sum(int part, double beta) const {
    require(part >= 0 && part < 3, ErrorKind::InvalidInput, "partition index must be 0, 1 or 2");
    return sums(beta).part[static_cast<std::size_t>(part)];
}

static double integral_from(const PartitionedBlockSystem::Sums& s, double beta, double lt) {
    return log_sum_exp({beta * lt + s.part[0], -beta * lt + s.part[1], s.part[2]}) - s.total;
}

double PartitionedBlockSystem::log_integral(double beta) const { return integral_from(sums(beta), beta, std::log(t)); }

IdentityResidual check_identities(const PartitionedBlockSystem& sys, double R, std::size_t points) {
    IdentityResidual res;
    res.points = points;
    const double lt = std::log(sys.t);
    for (double b : linspace(-R, R, points)) {
        const auto s = sys.sums(b);
        const double w0 = std::exp(-log1p_exp(b * lt));         // 1/(1+t^b)
        const double w1 = std::exp(b * lt - log1p_exp(b * lt));  // t^b/(1+t^b)
        const double e1 = sys.eta1.eval(b), e2 = sys.eta2.eval(b);
        res.max_eta1 = std::max(res.max_eta1, std::abs(std::exp(s.part[0] - s.total) - w0 * e1));
        res.max_eta2 = std::max(res.max_eta2, std::abs(std::exp(s.part[1] - s.total) - w1 * e2));
        const double P = std::tanh(b * lt / 2);
        res.max_integral =
            std::max(res.max_integral, std::abs(std::exp(integral_from(s, b, lt)) - (1 + P * (e1 - e2))));
    }
    res.counts_exact = sys.s1.exact_count() == sys.s1.size && sys.s2.exact_count() == sys.s2.size;
    return res;
}

// ---- block realization -----------------------------------------------------

namespace {

struct SideResult {
    ClassSide side;
    EtaEval eta;
    double fit_error = 0;
    double rebalance = 0;
};

// numerator_scaled_by_t: the t^beta eta2 side moves t onto the numerator classes.
SideResult realize_side(const Fn& part, double t, double eps, const JSeq& j, std::size_t first_j,
                        const RealizeOptions& opts, bool numerator_scaled_by_t) {
    SideResult out;
    const double lt = std::log(t);
    auto g_of = [part](double b) {
        const double v = std::min(std::max(part(b), 0.0), 0.5 - 1e-12);
        return v / (1.0 - 2.0 * v);
    };
    FitTarget target{g_of, opts.f_tail / std::max(1e-300, 1.0 - 2.0 * opts.f_tail)};
    FitOptions fo = opts.fit;
    fo.eps = eps / 3;
    fo.R = opts.R;
    FitResult fit = fit_c0(target, fo, true);
    out.fit_error = fit.certified_error;

    std::vector<Term> N = fit.r.numer(), D = fit.r.denom();
    double min_lc = std::numeric_limits<double>::infinity();
    for (const auto& v : {&N, &D})
        for (const auto& tm : *v) min_lc = std::min(min_lc, tm.log_coef);
    const double log_S = 40 * kLn2 - min_lc;
    std::vector<Mult> nm, dm;
    BigInt sumN = 0, sumD = 0;
    for (const auto& tm : N) {
        nm.push_back(Mult::from_log(tm.log_coef + log_S));
        sumN += nm.back().value();
    }
    for (const auto& tm : D) {
        dm.push_back(Mult::from_log(tm.log_coef + log_S));
        sumD += dm.back().value();
    }
    const BigInt total = 4 * sumN + 2 * sumD;
    const double log_total = big_log(total);

    // smallest ln(den(beta)(1+t^beta)) on the range, den = S(2N + D)
    double min_log_den = std::numeric_limits<double>::infinity();
    for (double b : linspace(-opts.R, opts.R, 4001)) {
        const double gv = fit.kernels.eval(b);
        const double v = log_S + fit.kernels.log_common_denominator(b) + std::log1p(2 * gv) + log1p_exp(b * lt);
        min_log_den = std::min(min_log_den, v);
    }
    const double budget = std::log(eps / 6) + min_log_den - kLn2;  // factor 2 safety for the grid

    std::size_t p = first_j;
    while (j.log_product(first_j, p) < 2 * log_total - budget + 1e-9) ++p;
    BigInt L, K, T;
    for (;; ++p) {
        L = j.product(first_j, p);
        K = L / total;
        if (K == 0) continue;
        T = L - K * total;
        const double log_TK = big_log(T) - big_log(K);
        if (T == 0 || log_TK <= budget) break;
    }
    out.rebalance = T == 0 ? 0.0 : std::exp(big_log(T) - big_log(K) - min_log_den);

    ClassSide& s = out.side;
    s.factors = {K, 2 * K, T};
    s.size = L;
    s.first_j = first_j;
    s.last_j = p;
    const double shift_num = numerator_scaled_by_t ? lt : 0.0;
    const double shift_rest = numerator_scaled_by_t ? 0.0 : lt;
    using G = ClassSide::Group;
    for (std::size_t i = 0; i < N.size(); ++i) {
        s.classes.push_back({N[i].log_base + shift_num, 0, nm[i], G::Num});
        s.classes.push_back({N[i].log_base + shift_num, 0, nm[i], G::NumCopy});
    }
    // (2 sum n a^b + sum m b^b)(1 + t^b) minus the numerator copies, plus T
    for (std::size_t i = 0; i < N.size(); ++i) s.classes.push_back({N[i].log_base + shift_rest, 1, nm[i], G::Rest});
    for (std::size_t i = 0; i < D.size(); ++i) {
        s.classes.push_back({D[i].log_base, 0, dm[i], G::Rest});
        s.classes.push_back({D[i].log_base + lt, 0, dm[i], G::Rest});
    }
    if (T > 0) s.classes.push_back({0.0, 2, Mult{1, 0}, G::Rest});

    out.eta.g = fit.kernels;
    out.eta.log_TK = T == 0 ? kNegInf : big_log(T) - big_log(K);
    out.eta.log_S = log_S;
    out.eta.log_t = lt;
    return out;
}

}  // namespace

RealizeResult realize_block(const Fn& f, double t, double eps, const JSeq& j, const RealizeOptions& opts) {
    require(t > 1, ErrorKind::InvalidInput, "realize_block needs t > 1");
    require(eps > 0, ErrorKind::InvalidInput, "realize_block needs eps > 0");
    require(j.tail >= 2, ErrorKind::InvalidInput, "j_k must be >= 2");
    for (int v : j.head) require(v >= 2, ErrorKind::InvalidInput, "j_k must be >= 2");
    for (double b : linspace(-opts.R, opts.R, 2001))
        require(std::abs(f(b)) <= 0.5 + 1e-12, ErrorKind::InvalidInput, "f must take values in [-1/2, 1/2]");

    Fn fp = [f](double b) { return std::max(f(b), 0.0); };
    Fn fm = [f](double b) { return std::max(-f(b), 0.0); };
    RealizeResult out;
    SideResult plus, minus;
    try {
        plus = realize_side(fp, t, eps, j, opts.first_j, opts, false);
        minus = realize_side(fm, t, eps, j, plus.side.last_j + 1, opts, true);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::FitFailure) throw;
        throw Error(ErrorKind::Realization, e.what());
    }
    out.system.s1 = std::move(plus.side);
    out.system.s2 = std::move(minus.side);
    out.system.t = t;
    out.system.eta1 = std::move(plus.eta);
    out.system.eta2 = std::move(minus.eta);
    out.system.R = opts.R;
    out.fit_error_plus = plus.fit_error;
    out.fit_error_minus = minus.fit_error;
    out.rebalance_plus = plus.rebalance;
    out.rebalance_minus = minus.rebalance;
    out.p = out.system.s1.last_j;
    out.n = out.system.s2.last_j;
    for (double b : linspace(-opts.R, opts.R, 10001))
        out.approx_error = std::max(out.approx_error, std::abs(f(b) - out.system.zeta(b)));
    if (out.approx_error > eps) {
        std::ostringstream os;
        os << "realized block misses f by " << out.approx_error << " > eps " << eps;
        throw Error(ErrorKind::Realization, os.str());
    }
    return out;
}

// ---- serialization ---------------------------------------------------------

static nlohmann::json side_json(const ClassSide& s) {
    auto factors = nlohmann::json::array();
    for (const auto& f : s.factors) factors.push_back(f.str());
    auto classes = nlohmann::json::array();
    for (const auto& c : s.classes)
        classes.push_back({dec(c.log_base), c.factor, std::to_string(c.mult.m), c.mult.e, c.group});
    return {{"factors", factors}, {"size", s.size.str()}, {"first_j", s.first_j}, {"last_j", s.last_j},
            {"classes", classes}};
}

static ClassSide side_from(const nlohmann::json& j) {
    ClassSide s;
    for (const auto& f : j.at("factors")) s.factors.emplace_back(f.get<std::string>());
    s.size = BigInt(j.at("size").get<std::string>());
    s.first_j = j.at("first_j").get<std::size_t>();
    s.last_j = j.at("last_j").get<std::size_t>();
    for (const auto& c : j.at("classes")) {
        ClassSide::Class k;
        k.log_base = parse_dec(c.at(0).get<std::string>());
        k.factor = c.at(1).get<int>();
        k.mult.m = std::stoull(c.at(2).get<std::string>());
        k.mult.e = c.at(3).get<std::int64_t>();
        k.group = c.at(4).get<int>();
        require(k.factor >= 0 && static_cast<std::size_t>(k.factor) < s.factors.size(), ErrorKind::InvalidInput,
                "class refers to a missing factor");
        s.classes.push_back(k);
    }
    return s;
}

static nlohmann::json eta_json(const EtaEval& e) {
    return {{"g", to_json(e.g)}, {"log_TK", dec(e.log_TK)}, {"log_S", dec(e.log_S)}, {"log_t", dec(e.log_t)}};
}

static EtaEval eta_from(const nlohmann::json& j) {
    EtaEval e;
    e.g = kernels_from_json(j.at("g"));
    e.log_TK = parse_dec(j.at("log_TK").get<std::string>());
    e.log_S = parse_dec(j.at("log_S").get<std::string>());
    e.log_t = parse_dec(j.at("log_t").get<std::string>());
    return e;
}

nlohmann::json to_json(const PartitionedBlockSystem& s) {
    return {{"t", dec(s.t)},       {"R", dec(s.R)},           {"s1", side_json(s.s1)},
            {"s2", side_json(s.s2)}, {"eta1", eta_json(s.eta1)}, {"eta2", eta_json(s.eta2)}};
}

PartitionedBlockSystem block_system_from_json(const nlohmann::json& j) {
    PartitionedBlockSystem s;
    s.t = parse_dec(j.at("t").get<std::string>());
    s.R = parse_dec(j.at("R").get<std::string>());
    s.s1 = side_from(j.at("s1"));
    s.s2 = side_from(j.at("s2"));
    s.eta1 = eta_from(j.at("eta1"));
    s.eta2 = eta_from(j.at("eta2"));
    return s;
}

}  // namespace kms::exprat
