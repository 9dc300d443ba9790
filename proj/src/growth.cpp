#include "kmsspec/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace kms::growth {

namespace {

Element unit(int d, int i, int sign) {
    Element e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(i)] = sign;
    return e;
}

int l1(const Element& g) {
    int s = 0;
    for (int v : g) s += std::abs(v);
    return s;
}

// all integer vectors of dimension d with l1 norm exactly k, lexicographic
void l1_sphere(int d, int k, Element& cur, std::size_t pos, std::vector<Element>& out) {
    if (pos + 1 == cur.size()) {
        cur[pos] = -k;
        out.push_back(cur);
        if (k > 0) {
            cur[pos] = k;
            out.push_back(cur);
        }
        return;
    }
    for (int v = -k; v <= k; ++v) {
        cur[pos] = v;
        l1_sphere(d, k - std::abs(v), cur, pos + 1, out);
    }
}

void check_cap(std::size_t n) {
    if (n > kMaxBallSize) throw Error(ErrorKind::SizeCap, "ball exceeds " + std::to_string(kMaxBallSize) + " elements");
}

}  // namespace

WordMetricGroup WordMetricGroup::lattice(int d) {
    require(d >= 1 && d <= 8, ErrorKind::InvalidInput, "lattice dimension must lie in [1, 8]");
    WordMetricGroup G;
    G.kind_ = Lattice;
    G.dim_ = d;
    for (int i = 0; i < d; ++i) {
        G.gens_.push_back(unit(d, i, 1));
        G.gens_.push_back(unit(d, i, -1));
    }
    return G;
}

WordMetricGroup WordMetricGroup::lattice(int d, const std::vector<Element>& gens) {
    require(d >= 1 && d <= 8, ErrorKind::InvalidInput, "lattice dimension must lie in [1, 8]");
    WordMetricGroup G;
    G.kind_ = Lattice;
    G.dim_ = d;
    G.standard_ = false;
    std::set<Element> seen;
    for (const auto& g : gens) {
        require(g.size() == static_cast<std::size_t>(d), ErrorKind::InvalidInput, "generator has the wrong dimension");
        require(l1(g) > 0, ErrorKind::InvalidInput, "the identity is not a generator");
        for (const Element& h : {g, G.inverse(g)})
            if (seen.insert(h).second) G.gens_.push_back(h);
    }
    // they generate iff every unit vector is reachable
    for (int i = 0; i < d; ++i) G.word_length(unit(d, i, 1));
    return G;
}

WordMetricGroup WordMetricGroup::free_group(int rank) {
    require(rank >= 1 && rank <= 8, ErrorKind::InvalidInput, "free rank must lie in [1, 8]");
    WordMetricGroup G;
    G.kind_ = Free;
    G.dim_ = rank;
    for (int l = 0; l < 2 * rank; ++l) G.gens_.push_back({l});
    return G;
}

Element WordMetricGroup::identity() const { return kind_ == Lattice ? Element(static_cast<std::size_t>(dim_), 0) : Element{}; }

Element WordMetricGroup::mul(const Element& g, const Element& h) const {
    if (kind_ == Lattice) {
        Element r(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) r[i] = g[i] + h[i];
        return r;
    }
    Element r = g;
    for (int l : h) {
        if (!r.empty() && r.back() == (l ^ 1))
            r.pop_back();
        else
            r.push_back(l);
    }
    return r;
}

Element WordMetricGroup::inverse(const Element& g) const {
    Element r;
    if (kind_ == Lattice) {
        for (int v : g) r.push_back(-v);
        return r;
    }
    for (auto it = g.rbegin(); it != g.rend(); ++it) r.push_back(*it ^ 1);
    return r;
}

int WordMetricGroup::word_length(const Element& g) const {
    if (kind_ == Free) return static_cast<int>(g.size());
    if (standard_) return l1(g);
    // BFS until g shows up
    std::set<Element> seen{identity()};
    std::vector<Element> frontier{identity()};
    for (int k = 0;; ++k) {
        if (seen.count(g)) return k;
        std::vector<Element> next;
        for (const auto& x : frontier)
            for (const auto& s : gens_) {
                Element y = mul(x, s);
                if (seen.insert(y).second) next.push_back(std::move(y));
            }
        check_cap(seen.size());
        if (next.empty()) throw Error(ErrorKind::InvalidInput, "generators do not reach the element");
        frontier = std::move(next);
    }
}

std::vector<Element> WordMetricGroup::sphere(int k) const {
    require(k >= 0, ErrorKind::InvalidInput, "radius must be >= 0");
    if (k == 0) return {identity()};
    if (kind_ == Lattice && standard_) {
        std::vector<Element> sph;
        Element cur(static_cast<std::size_t>(dim_), 0);
        l1_sphere(dim_, k, cur, 0, sph);
        check_cap(sph.size());
        return sph;
    }
    return spheres(k).back();
}

std::vector<std::vector<Element>> WordMetricGroup::spheres(int n_max) const {
    require(n_max >= 0, ErrorKind::InvalidInput, "radius must be >= 0");
    std::vector<std::vector<Element>> out{{identity()}};
    std::size_t total = 1;
    if (kind_ == Free) {
        for (int k = 1; k <= n_max; ++k) {
            std::vector<Element> sph;
            for (const auto& w : out.back())
                for (int l = 0; l < 2 * dim_; ++l)
                    if (w.empty() || w.back() != (l ^ 1)) {
                        sph.push_back(w);
                        sph.back().push_back(l);
                    }
            total += sph.size();
            check_cap(total);
            out.push_back(std::move(sph));
        }
        return out;
    }
    if (standard_) {
        for (int k = 1; k <= n_max; ++k) {
            std::vector<Element> sph;
            Element cur(static_cast<std::size_t>(dim_), 0);
            l1_sphere(dim_, k, cur, 0, sph);
            total += sph.size();
            check_cap(total);
            out.push_back(std::move(sph));
        }
        return out;
    }
    std::set<Element> seen{identity()};
    for (int k = 1; k <= n_max; ++k) {
        std::set<Element> sph;
        for (const auto& x : out.back())
            for (const auto& s : gens_) {
                Element y = mul(x, s);
                if (!seen.count(y)) sph.insert(std::move(y));
            }
        seen.insert(sph.begin(), sph.end());
        check_cap(seen.size());
        out.emplace_back(sph.begin(), sph.end());
    }
    return out;
}

Census ball_census(const WordMetricGroup& G, int n_max) {
    Census c;
    const auto sph = G.spheres(n_max);
    for (std::size_t k = 0; k < sph.size(); ++k) {
        c.sphere_sizes.push_back(sph[k].size());
        c.indicator.push_back(k == 0 ? 0.0 : std::pow(static_cast<double>(sph[k].size()), 1.0 / static_cast<double>(k)));
    }
    return c;
}

void require_subexponential(const WordMetricGroup& G, int horizon, double threshold) {
    Census c;
    try {
        c = ball_census(G, horizon);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SizeCap) throw;
        throw Error(ErrorKind::Domain, "growth precheck: ball outgrows the enumeration cap before radius " +
                                           std::to_string(horizon) + "; treated as exponential growth");
    }
    const double ind = c.indicator.back();
    if (ind > threshold)
        throw Error(ErrorKind::Domain, "growth precheck: |G_" + std::to_string(horizon) + "|^(1/" +
                                           std::to_string(horizon) + ") = " + dec(ind) + " exceeds " + dec(threshold));
}

// ---- models ------------------------------------------------------------------

int CocycleModel::act(const Element& g, int x) const {
    require(group.kind() == WordMetricGroup::Lattice, ErrorKind::InvalidInput, "models act through lattices only");
    long long s = x;
    for (std::size_t i = 0; i < g.size(); ++i) s += static_cast<long long>(g[i]) * steps[i] % M;
    s %= M;
    return static_cast<int>(s < 0 ? s + M : s);
}

double CocycleModel::H(int x) const { return std::cos(2.0 * std::numbers::pi * x / M); }

double CocycleModel::omega(const Element& g, int x) const {
    double lin = 0;
    for (std::size_t i = 0; i < g.size(); ++i) lin += c[i] * g[i];
    return amp == 0.0 ? lin : amp * (H(act(g, x)) - H(x)) + lin;
}

namespace {

CocycleModel rotation(double amp, double c, int M, const std::string& name) {
    require(M >= 1, ErrorKind::InvalidInput, "grid size must be >= 1");
    CocycleModel m;
    m.M = M;
    m.steps = {static_cast<int>(std::llround(M * (std::sqrt(5.0) - 1) / 2)) % M};
    m.amp = amp;
    m.c = {c};
    m.name = name;
    return m;
}

}  // namespace

CocycleModel coboundary_model(double amp, int M) { return rotation(amp, 0.0, M, "coboundary"); }
CocycleModel homomorphism_model(double c) { return rotation(0.0, c, 1, "homomorphism"); }
CocycleModel mixed_model(double amp, double c, int M) { return rotation(amp, c, M, "mixed"); }

CocycleModel model_from_preset(const std::string& preset, double amp, double c, int M) {
    if (preset == "coboundary") return coboundary_model(amp, M);
    if (preset == "homomorphism") return homomorphism_model(c);
    if (preset == "mixed") return mixed_model(amp, c, M);
    if (preset == "trivial") return rotation(0.0, 0.0, M, "trivial");
    throw Error(ErrorKind::InvalidInput, "unknown cocycle preset '" + preset + "'");
}

double cocycle_defect(const CocycleModel& m, std::uint64_t seed, std::size_t trials, int radius) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coord(-radius, radius), state(0, m.M - 1);
    const int d = m.group.dim();
    double worst = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Element g(static_cast<std::size_t>(d)), h(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            g[static_cast<std::size_t>(i)] = coord(rng);
            h[static_cast<std::size_t>(i)] = coord(rng);
        }
        const int x = state(rng);
        const double lhs = m.omega(g, m.act(h, x)) + m.omega(h, x);
        worst = std::max(worst, std::abs(lhs - m.omega(m.group.mul(g, h), x)));
    }
    return worst;
}

// ---- limsup ------------------------------------------------------------------

namespace {

LimsupEstimate limsup_on(const CocycleModel& m, const std::vector<std::vector<Element>>& sph, int x, double beta) {
    const int N = static_cast<int>(sph.size()) - 1;
    LimsupEstimate est;
    est.horizon = N;
    est.tail.assign(static_cast<std::size_t>(N), -std::numeric_limits<double>::infinity());
    double run = -std::numeric_limits<double>::infinity();
    for (int k = N; k >= 1; --k) {
        for (const auto& g : sph[static_cast<std::size_t>(k)]) run = std::max(run, beta * m.omega(g, x) / k);
        est.tail[static_cast<std::size_t>(k - 1)] = run;
    }
    est.estimate = est.tail[static_cast<std::size_t>(N / 2)];
    return est;
}

}  // namespace

LimsupEstimate limsup_ratio(const CocycleModel& m, int x, double beta, int horizon) {
    require(horizon >= 2, ErrorKind::InvalidInput, "horizon must be >= 2");
    require(x >= 0 && x < m.M, ErrorKind::InvalidInput, "base point outside the state space");
    require_subexponential(m.group);
    return limsup_on(m, m.group.spheres(horizon), x, beta);
}

std::string to_string(SpectrumShape s) {
    switch (s) {
        case SpectrumShape::Zero: return "{0}";
        case SpectrumShape::NonNegative: return "[0,inf)";
        case SpectrumShape::NonPositive: return "(-inf,0]";
        case SpectrumShape::Real: return "R";
    }
    return "?";
}

SpectrumShape classify_spectrum(bool has_nonpos_limsup_point, bool has_nonneg_liminf_point) {
    if (has_nonpos_limsup_point) return has_nonneg_liminf_point ? SpectrumShape::Real : SpectrumShape::NonNegative;
    return has_nonneg_liminf_point ? SpectrumShape::NonPositive : SpectrumShape::Zero;
}

Classification classify_model(const CocycleModel& m, int horizon) {
    require(horizon >= 2, ErrorKind::InvalidInput, "horizon must be >= 2");
    require_subexponential(m.group);
    const auto sph = m.group.spheres(horizon);
    Classification c;
    c.horizon = horizon;
    std::vector<int> xs;
    const int stride = std::max(1, m.M / 64);
    for (int x = 0; x < m.M; x += stride) xs.push_back(x);
    double B = 0;
    for (int x = 0; x < m.M; ++x)
        for (const auto& s : m.group.generators()) B = std::max(B, std::abs(m.omega(s, x)));
    // a coboundary with |Omega(s, .)| <= B has |H| <= B/2 up to a constant, so its ratio past N/2 is <= 2B/N
    c.decision_tol = 4.0 * B / horizon;
    c.best_plus = c.best_minus = std::numeric_limits<double>::infinity();
    for (int x : xs) {
        const double p = limsup_on(m, sph, x, 1.0).estimate, q = limsup_on(m, sph, x, -1.0).estimate;
        if (p < c.best_plus) {
            c.best_plus = p;
            c.x_plus = x;
        }
        if (q < c.best_minus) {
            c.best_minus = q;
            c.x_minus = x;
        }
    }
    c.nonpos_limsup = c.best_plus <= c.decision_tol;
    c.nonneg_liminf = c.best_minus <= c.decision_tol;
    c.shape = classify_spectrum(c.nonpos_limsup, c.nonneg_liminf);
    return c;
}

// ---- measure nets ------------------------------------------------------------

std::vector<double> MeasureNet::state_measure(int M) const {
    std::vector<double> out(static_cast<std::size_t>(M), 0.0);
    for (const auto& a : atoms) out[static_cast<std::size_t>(a.state)] += a.weight;
    return out;
}

MeasureNet build_measure_net(const CocycleModel& m, int x, double beta, double s, int R) {
    require(s > 0, ErrorKind::InvalidInput, "s must be positive");
    require(x >= 0 && x < m.M, ErrorKind::InvalidInput, "base point outside the state space");
    require(R >= 0, ErrorKind::InvalidInput, "radius must be >= 0");
    require_subexponential(m.group);
    MeasureNet net;
    net.x = x;
    net.beta = beta;
    net.s = s;
    std::vector<Element> gs;
    std::vector<double> lw;
    LogSum total;
    double last_sphere = kNegInf;
    const int cap = R > 0 ? R : kMaxNetRadius;
    int k = 0;
    try {
        for (; k <= cap; ++k) {
            std::vector<Element> sph = m.group.sphere(k);
            LogSum here;
            for (auto& g : sph) {
                const double w = beta * m.omega(g, x) - k * s;
                lw.push_back(w);
                here.add(w);
                gs.push_back(std::move(g));
            }
            check_cap(gs.size());
            last_sphere = here.value();
            total.add(last_sphere);
            if (R == 0 && k > 0 && last_sphere - total.value() < std::log(kNetTailRel)) break;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SizeCap) throw;
        throw Error(ErrorKind::Convergence, "measure net: weights have not decayed before the ball cap (s = " + dec(s) + ")");
    }
    if (k > cap) k = cap;
    if (R == 0 && k == kMaxNetRadius)
        throw Error(ErrorKind::Convergence, "measure net: weights do not decay for s = " + dec(s));
    net.R = k;
    const double lz = total.value();
    net.tail_mass = std::exp(last_sphere - lz);
    if (net.tail_mass >= kNetTailRel)
        throw Error(ErrorKind::Convergence, "measure net: outer sphere carries " + dec(net.tail_mass) +
                                                " of the mass at R = " + std::to_string(k));
    net.atoms.reserve(gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i)
        net.atoms.push_back({gs[i], m.act(gs[i], x), std::exp(lw[i] - lz)});
    return net;
}

NetCertificate certify_measure_net(const CocycleModel& m, const MeasureNet& net) {
    NetCertificate cert;
    cert.s = net.s;
    cert.R = net.R;
    double sum = 0;
    for (const auto& a : net.atoms) sum += a.weight;
    cert.mass_defect = std::abs(sum - 1.0);

    struct TestFn {
        std::string name;
        std::vector<double> v;
    };
    std::vector<TestFn> fs;
    const double M = m.M;
    auto add = [&](std::string name, auto f) {
        TestFn t{std::move(name), {}};
        for (int y = 0; y < m.M; ++y) t.v.push_back(f(y));
        fs.push_back(std::move(t));
    };
    add("one", [](int) { return 1.0; });
    if (m.M > 1) {
        for (int j = 1; j <= 2; ++j) {
            add("cos" + std::to_string(j), [&, j](int y) { return std::cos(2 * std::numbers::pi * j * y / M); });
            add("sin" + std::to_string(j), [&, j](int y) { return std::sin(2 * std::numbers::pi * j * y / M); });
        }
        add("half", [&](int y) { return y < m.M / 2 ? 1.0 : 0.0; });
    }

    cert.pass = cert.mass_defect <= 1e-12;
    for (const auto& h : m.group.generators()) {
        const int hl = m.group.word_length(h);
        double shell = 0;
        for (const auto& a : net.atoms)
            if (m.group.word_length(a.g) > net.R - hl) shell += a.weight;
        std::string hname;
        for (int v : h) hname += (hname.empty() ? "" : ",") + std::to_string(v);
        for (const auto& f : fs) {
            double sup = 0, lhs = 0, rhs = 0;
            for (double v : f.v) sup = std::max(sup, std::abs(v));
            for (const auto& a : net.atoms) {
                const auto y = static_cast<std::size_t>(a.state);
                lhs += a.weight * f.v[static_cast<std::size_t>(m.act(h, a.state))] * std::exp(net.beta * m.omega(h, a.state));
                rhs += a.weight * f.v[y];
            }
            DefectRow r{"(" + hname + ")", f.name, std::abs(lhs - rhs), sup * (std::exp(hl * net.s) - 1.0),
                        2.0 * sup * shell, false};
            // rounding in the sums is far below either term
            r.ok = r.measured <= r.bound + r.slack + 1e-13;
            cert.pass = cert.pass && r.ok;
            cert.rows.push_back(std::move(r));
        }
    }
    return cert;
}

// ---- Omega_mu ------------------------------------------------------------------

double OmegaMu::eval(const Element& g) const {
    double s = 0;
    for (std::size_t i = 0; i < g.size() && i < on_generators.size(); ++i) s += g[i] * on_generators[i];
    return s;
}

OmegaMu omega_mu(const CocycleModel& m, const conformal::ProbVector& mu, std::uint64_t seed) {
    require(mu.size() == static_cast<std::size_t>(m.M), ErrorKind::InvalidInput, "measure size differs from the state space");
    OmegaMu out;
    const int d = m.group.dim();
    for (int i = 0; i < d; ++i) {
        const Element e = unit(d, i, 1);
        for (int y = 0; y < m.M; ++y)
            out.invariance_defect = std::max(out.invariance_defect,
                                             std::abs(mu[static_cast<std::size_t>(m.act(m.group.inverse(e), y))] -
                                                      mu[static_cast<std::size_t>(y)]));
    }
    require(out.invariance_defect <= 1e-10, ErrorKind::Domain,
            "measure is not invariant (defect " + dec(out.invariance_defect) + ")");
    auto integral = [&](const Element& g) {
        double s = 0;
        for (int y = 0; y < m.M; ++y) s += mu[static_cast<std::size_t>(y)] * m.omega(g, y);
        return s;
    };
    for (int i = 0; i < d; ++i) out.on_generators.push_back(integral(unit(d, i, 1)));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coord(-20, 20);
    for (int t = 0; t < 200; ++t) {
        Element g(static_cast<std::size_t>(d)), h(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            g[static_cast<std::size_t>(i)] = coord(rng);
            h[static_cast<std::size_t>(i)] = coord(rng);
        }
        out.max_additivity_defect =
            std::max(out.max_additivity_defect, std::abs(integral(m.group.mul(g, h)) - integral(g) - integral(h)));
    }
    bool zero = true;
    for (double v : out.on_generators) zero = zero && std::abs(v) <= 1e-9;
    out.shape = zero ? SpectrumShape::Real : SpectrumShape::Zero;
    return out;
}

// ---- json ----------------------------------------------------------------------

nlohmann::json to_json(const Census& c) {
    auto ind = nlohmann::json::array();
    for (double v : c.indicator) ind.push_back(dec(v));
    return {{"sphere_sizes", c.sphere_sizes}, {"indicator", ind}};
}

nlohmann::json to_json(const Classification& c) {
    return {{"horizon", c.horizon},           {"decision_tol", dec(c.decision_tol)}, {"best_plus", dec(c.best_plus)},
            {"best_minus", dec(c.best_minus)}, {"x_plus", c.x_plus},                  {"x_minus", c.x_minus},
            {"nonpos_limsup", c.nonpos_limsup}, {"nonneg_liminf", c.nonneg_liminf},    {"shape", to_string(c.shape)}};
}

nlohmann::json to_json(const NetCertificate& c) {
    auto rows = nlohmann::json::array();
    for (const auto& r : c.rows)
        rows.push_back({{"h", r.h}, {"f", r.f}, {"measured", dec(r.measured)}, {"bound", dec(r.bound)},
                        {"slack", dec(r.slack)}, {"ok", r.ok}});
    return {{"s", dec(c.s)}, {"R", c.R}, {"mass_defect", dec(c.mass_defect)}, {"rows", rows}, {"pass", c.pass}};
}

nlohmann::json to_json(const OmegaMu& o) {
    auto g = nlohmann::json::array();
    for (double v : o.on_generators) g.push_back(dec(v));
    return {{"on_generators", g},
            {"invariance_defect", dec(o.invariance_defect)},
            {"max_additivity_defect", dec(o.max_additivity_defect)},
            {"shape", to_string(o.shape)}};
}

}  // namespace kms::growth
