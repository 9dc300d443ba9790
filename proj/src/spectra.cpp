#include "kmsspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "kmsspec/padic.hpp"

namespace kms::spectra {

Fn target_zeta_from_set(const ClosedSetSpec& K) {
    require(K.contains(0.0), ErrorKind::Domain, "0 must lie in K: the wreath target needs an invariant measure");
    return [K](double b) { return K.distance(b) / (2.0 * (1.0 + b * b)); };
}

double target_zeta_tail(double R) {
    require(R >= 1, ErrorKind::InvalidInput, "tail bound needs R >= 1");
    // d(beta, K) <= |beta| and |beta| / (1 + beta^2) decreases for |beta| >= 1
    return R / (2.0 * (1.0 + R * R));
}

Fn target_phi_from_set(const ClosedSetSpec& K, double t) {
    require(t > 1, ErrorKind::InvalidInput, "need t > 1");
    Fn zeta = target_zeta_from_set(K);
    return [zeta, t](double b) { return 1.0 + realizable::mobius_eval(t, b) * zeta(b); };
}

TargetCheck check_target(const ClosedSetSpec& K, double t, double R, std::size_t grid_n) {
    const Fn phi = target_phi_from_set(K, t);
    TargetCheck c;
    c.zero_set_matches = true;
    for (double b : linspace(-R, R, grid_n)) {
        const double v = phi(b) - 1.0;
        c.max_correction = std::max(c.max_correction, std::abs(v));
        c.zero_set_matches = c.zero_set_matches && ((v == 0.0) == (K.distance(b) == 0.0 || b == 0.0));
    }
    c.correction_at_R = std::max(std::abs(phi(R) - 1.0), std::abs(phi(-R) - 1.0));
    return c;
}

// ---- solver ----------------------------------------------------------------

namespace {

double bisect(const Fn& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// argmin of |f| on [lo, hi], assuming one dip
std::pair<double, double> golden_min(const Fn& f, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = std::abs(f(c)), fd = std::abs(f(d));
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = std::abs(f(c));
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = std::abs(f(d));
        }
    }
    return fc <= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

}  // namespace

std::vector<std::size_t> SpectrumReport::grid_trace() const {
    std::vector<std::size_t> out;
    if (grid_n < 2) return out;
    const double reach = trace_reach(spacing);
    const auto xs = linspace(-R, R, grid_n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        bool hit = false;
        for (const auto& iv : flat_intervals) hit = hit || (xs[i] >= iv.lo && xs[i] <= iv.hi);
        for (double r : isolated_roots) hit = hit || std::abs(xs[i] - r) <= reach;
        if (hit) out.push_back(i);
    }
    return out;
}

SpectrumReport solve_zero_set(const Fn& defect, bool is_signed, double R, double tol, std::size_t grid_n) {
    require(R > 0 && tol > 0 && grid_n >= 3, ErrorKind::InvalidInput, "need R > 0, tol > 0 and at least 3 grid points");
    SpectrumReport rep;
    rep.tol = tol;
    rep.strict_tol = tol / 100;
    rep.R = R;
    rep.grid_n = grid_n;
    const auto xs = linspace(-R, R, grid_n);
    rep.spacing = xs[1] - xs[0];
    const auto v = eval_grid(defect, xs);
    const std::size_t n = xs.size();
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(std::isfinite(v[i]), ErrorKind::Numeric, "defect is not finite at beta = " + dec(xs[i]));
        a[i] = std::abs(v[i]);
    }
    // runs at tol are flat sets; tol/100 only decides isolated minima
    std::vector<char> used(n, 0), zero(n, 0);
    for (std::size_t i = 0; i < n; ++i) zero[i] = a[i] <= tol;

    for (std::size_t i = 0; i < n;) {
        if (!zero[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && zero[j + 1]) ++j;
        // a run that is small but never numerically zero is a dip, left to the minimum pass
        bool vanishes = false;
        for (std::size_t m = i; m <= j; ++m) vanishes = vanishes || a[m] <= rep.strict_tol;
        if (j > i && vanishes) {
            rep.flat_intervals.push_back({xs[i], xs[j], i == 0, j == n - 1});
            for (std::size_t m = i; m <= j; ++m) used[m] = 1;
        }
        i = j + 1;
    }

    std::vector<char> crossed(n, 0);  // cell [i, i+1] holds a bisected root
    if (is_signed)
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (used[i] || used[i + 1] || zero[i] || zero[i + 1]) continue;
            if ((v[i] < 0) == (v[i + 1] < 0)) continue;
            rep.isolated_roots.push_back(bisect(defect, xs[i], xs[i + 1], v[i]));
            crossed[i] = 1;
        }

    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double left = i > 0 ? a[i - 1] : inf, right = i + 1 < n ? a[i + 1] : inf;
        if (!(a[i] < left && a[i] <= right)) continue;
        if ((i > 0 && crossed[i - 1]) || crossed[i]) continue;
        const double lo = xs[i > 0 ? i - 1 : 0], hi = xs[std::min(i + 1, n - 1)];
        auto [x, fx] = golden_min(defect, lo, hi);
        if (a[i] <= fx) {
            x = xs[i];
            fx = a[i];
        }
        if (fx <= rep.strict_tol)
            rep.isolated_roots.push_back(x);
        else if (fx <= tol)
            rep.near_misses.push_back(x);
    }
    std::sort(rep.isolated_roots.begin(), rep.isolated_roots.end());
    std::vector<double> roots;
    for (double r : rep.isolated_roots) {
        if (roots.empty() || r - roots.back() > rep.spacing / 2) {
            roots.push_back(r);
            continue;
        }
        // one root found twice agrees to ~sqrt(eps); anything wider is two roots inside half a cell
        if (r - roots.back() > 1e-6 * std::max(1.0, R))
            rep.warnings.push_back("resolution: roots at " + dec(roots.back()) + " and " + dec(r) +
                                   " lie within half a grid cell and were merged");
    }
    rep.isolated_roots = roots;
    std::sort(rep.near_misses.begin(), rep.near_misses.end());

    // features closer than two cells cannot be told apart on this grid
    std::vector<std::pair<double, double>> feats;
    for (const auto& iv : rep.flat_intervals) feats.push_back({iv.lo, iv.hi});
    for (double r : rep.isolated_roots) feats.push_back({r, r});
    std::sort(feats.begin(), feats.end());
    for (std::size_t i = 1; i < feats.size(); ++i)
        if (feats[i].first - feats[i - 1].second < 2 * rep.spacing) {
            std::ostringstream os;
            os << "resolution: features at " << dec(feats[i - 1].second) << " and " << dec(feats[i].first)
               << " are closer than two grid cells";
            rep.warnings.push_back(os.str());
        }
    for (double x : rep.near_misses) {
        std::ostringstream os;
        os << "near-miss at " << dec(x) << ": defect below tol but not below tol/100; not reported as spectrum";
        rep.warnings.push_back(os.str());
    }
    return rep;
}

SpectrumReport solve_spectrum(const Fn& phi, double R, double tol, std::size_t grid_n) {
    return solve_zero_set([phi](double b) { return phi(b) - 1.0; }, true, R, tol, grid_n);
}

nlohmann::json to_json(const SpectrumReport& r) {
    auto roots = nlohmann::json::array(), ivs = nlohmann::json::array(), nm = nlohmann::json::array();
    for (double x : r.isolated_roots) roots.push_back(dec(x));
    for (const auto& iv : r.flat_intervals)
        ivs.push_back({{"lo", dec(iv.lo)}, {"hi", dec(iv.hi)}, {"clipped_lo", iv.clipped_lo}, {"clipped_hi", iv.clipped_hi}});
    for (double x : r.near_misses) nm.push_back(dec(x));
    return {{"isolated_roots", roots}, {"flat_intervals", ivs}, {"near_misses", nm},
            {"tol", dec(r.tol)},       {"strict_tol", dec(r.strict_tol)}, {"R", dec(r.R)},
            {"grid_n", r.grid_n},      {"spacing", dec(r.spacing)},       {"warnings", r.warnings}};
}

// ---- wreath ----------------------------------------------------------------

const Cell& WreathWindow::at(int m) const {
    require(has(m), ErrorKind::Window, "coordinate " + std::to_string(m) + " lies outside the window");
    return cells[static_cast<std::size_t>(m - lo)];
}

std::size_t WreathSystem::cell_rank() const {
    std::size_t r = 0;
    for (const auto& s : cocycle.stages) r += s.cell_rank();
    return r;
}

std::vector<std::size_t> WreathSystem::cell_extents() const {
    std::vector<std::size_t> e;
    for (const auto& s : cocycle.stages)
        for (std::size_t d = 0; d < s.cell_rank(); ++d) e.push_back(s.cell_extent(d));
    return e;
}

std::size_t WreathSystem::cell_count() const {
    std::size_t c = 1;
    for (std::size_t e : cell_extents()) c = e != 0 && c > std::numeric_limits<std::size_t>::max() / e ? std::numeric_limits<std::size_t>::max() : c * e;
    return c;
}

double WreathSystem::log_phi(double beta) const { return cocycle.log_eval_phi(beta); }

double WreathSystem::log_H(const Cell& x) const {
    require(x.size() == cell_rank(), ErrorKind::InvalidInput, "cell has the wrong rank");
    double s = 0;
    std::size_t off = 0;
    for (const auto& st : cocycle.stages) {
        s += st.log_cell_potential(x.data() + off);
        off += st.cell_rank();
    }
    return s;
}

double WreathSystem::log_nu(double beta, const Cell& x) const {
    require(x.size() == cell_rank(), ErrorKind::InvalidInput, "cell has the wrong rank");
    double s = 0;
    std::size_t off = 0;
    for (const auto& st : cocycle.stages) {
        s += st.log_cell_measure(beta, x.data() + off);
        off += st.cell_rank();
    }
    return s;
}

double WreathSystem::log_eta(double beta, const Cell& x) const {
    return log_nu(beta, x) + beta * log_H(x) - log_phi(beta);
}

double WreathSystem::omega_shift(int n, const WreathWindow& x) const {
    double s = 0;
    if (n > 0)
        for (int i = 0; i < n; ++i) s -= log_H(x.at(-i));
    else
        for (int i = 1; i <= -n; ++i) s += log_H(x.at(i));
    return s;
}

Cell WreathSystem::act(std::size_t stage, int lambda, const Cell& x) const {
    require(stage < cocycle.stages.size(), ErrorKind::InvalidInput, "stage out of range");
    const auto& st = cocycle.stages[stage];
    require(!st.factorized, ErrorKind::UnsupportedGenerator, "group elements act on explicit stages only");
    require(lambda >= 0 && lambda < st.block.group.order, ErrorKind::InvalidInput, "group element out of range");
    std::size_t off = 0;
    for (std::size_t s = 0; s < stage; ++s) off += cocycle.stages[s].cell_rank();
    Cell y = x;
    y[off] = static_cast<std::size_t>(st.block.group.op(lambda, static_cast<int>(x[off])));
    return y;
}

double WreathSystem::omega_lambda(int n, std::size_t stage, int lambda, const Cell& x) const {
    const Cell y = act(stage, lambda, x);
    std::size_t off = 0;
    for (std::size_t s = 0; s < stage; ++s) off += cocycle.stages[s].cell_rank();
    const auto& blk = cocycle.stages[stage].block;
    double om = std::log(blk.base_measure[y[off]]) - std::log(blk.base_measure[x[off]]);
    if (n <= 0) om += std::log(blk.potential[y[off]]) - std::log(blk.potential[x[off]]);
    return om;
}

WreathSystem assemble_wreath(const realizable::RealizableCocycle& cocycle) {
    require(!cocycle.stages.empty(), ErrorKind::InvalidInput, "cocycle has no stages");
    return WreathSystem{cocycle};
}

double shift_rn_derivative(const WreathSystem& sys, double beta, const Cell& x0) {
    return std::exp(sys.log_phi(beta) - beta * sys.log_H(x0));
}

FactorMeasures factor_measures(const WreathSystem& sys, double beta) {
    const auto ext = sys.cell_extents();
    const std::size_t count = sys.cell_count();
    require(count <= kMaxEnumeratedCells, ErrorKind::SizeCap, "too many cells to enumerate");
    FactorMeasures fm;
    std::vector<double> lnu;
    for (std::size_t idx = 0; idx < count; ++idx) {
        Cell c(ext.size());
        std::size_t r = idx;
        for (std::size_t d = ext.size(); d-- > 0;) {
            c[d] = r % ext[d];
            r /= ext[d];
        }
        lnu.push_back(sys.log_nu(beta, c));
        fm.log_H.push_back(sys.log_H(c));
        fm.cells.push_back(std::move(c));
    }
    fm.nu = conformal::ProbVector::from_log(lnu);
    fm.eta = conformal::cohomologous_transform(fm.nu, fm.log_H, beta);
    return fm;
}

// ---- free product ----------------------------------------------------------

namespace {

std::map<int, int> theta0(const std::map<int, int>& x) {
    std::map<int, int> out;
    for (auto [k, v] : x) out[k < 0 ? k : k + 1] = v;
    out[0] = 0;
    return out;
}

std::map<int, int> theta0_inv(const std::map<int, int>& x) {
    std::map<int, int> out;
    for (auto [k, v] : x) {
        if (k < 0) out[k] = v;
        else if (k > 0) out[k - 1] = v;
    }
    return out;
}

std::map<int, Cell> shifted(const std::map<int, Cell>& y, int by) {
    std::map<int, Cell> out;
    for (const auto& [k, v] : y) out[k + by] = v;
    return out;
}

}  // namespace

const realizable::RealizableCocycle& FreeProductSystem::model(int which) const {
    require(which == 1 || which == 2, ErrorKind::InvalidInput, "factor index must be 1 or 2");
    return which == 1 ? model1 : model2;
}

double FreeProductSystem::log_phi_model(int which, double beta) const { return model(which).log_eval_phi(beta); }

double FreeProductSystem::log_H(int which, const Cell& c) const { return WreathSystem{model(which)}.log_H(c); }

double FreeProductSystem::log_nu(int which, double beta, const Cell& c) const {
    return WreathSystem{model(which)}.log_nu(beta, c);
}

double FreeProductSystem::log_eta(int which, double beta, const Cell& c) const {
    return log_nu(which, beta, c) + beta * log_H(which, c) - log_phi_model(which, beta);
}

Region FreeProductSystem::region(const FPCylinder& c) const {
    auto it0 = c.x.find(0);
    require(it0 != c.x.end(), ErrorKind::Window, "cylinder does not fix the Lambda_0 coordinate 0");
    if (it0->second != 0) return Region::Y1;
    auto it1 = c.x.find(1);
    require(it1 != c.x.end(), ErrorKind::Window, "cylinder does not fix the Lambda_0 coordinate 1");
    return it1->second == 0 ? Region::Y0 : Region::Y2;
}

bool FreeProductSystem::in_window(const FPCylinder& c) const {
    for (auto [k, v] : c.x)
        if (k < -W || k > W + 1 || v < 0 || v >= lambda0) return false;
    for (const auto* m : {&c.y, &c.z})
        for (const auto& kv : *m)
            if (kv.first < -W || kv.first > W) return false;
    return true;
}

FPCylinder FreeProductSystem::theta(const FPCylinder& c) const {
    switch (region(c)) {
        case Region::Y0: return c;
        case Region::Y1: return {theta0(c.x), c.y, shifted(c.z, 1)};
        case Region::Y2: return {theta0_inv(c.x), shifted(c.y, 1), c.z};
    }
    return c;
}

FPCylinder FreeProductSystem::theta_inverse(const FPCylinder& c) const {
    switch (region(c)) {
        case Region::Y0: return c;
        case Region::Y2: return {theta0_inv(c.x), c.y, shifted(c.z, -1)};
        case Region::Y1: return {theta0(c.x), shifted(c.y, -1), c.z};
    }
    return c;
}

double FreeProductSystem::omega_a(const FPCylinder& c) const {
    switch (region(c)) {
        case Region::Y0: return 0.0;
        case Region::Y1:
            require(c.y.count(0), ErrorKind::Window, "cylinder does not fix y_0");
            return log_H(1, c.y.at(0));
        case Region::Y2:
            require(c.z.count(0), ErrorKind::Window, "cylinder does not fix z_0");
            return log_H(2, c.z.at(0));
    }
    return 0.0;
}

double FreeProductSystem::log_measure(double beta, const FPCylinder& c) const {
    double s = 0;
    for (auto [k, v] : c.x) {
        require(v >= 0 && v < lambda0, ErrorKind::InvalidInput, "Lambda_0 value out of range");
        s -= std::log(static_cast<double>(lambda0));
    }
    for (const auto& [k, cell] : c.y) s += k >= 0 ? log_nu(1, beta, cell) : log_eta(1, beta, cell);
    for (const auto& [k, cell] : c.z) s += k >= 0 ? log_nu(2, beta, cell) : log_eta(2, beta, cell);
    return s;
}

FreeProductSystem assemble_free_product(const realizable::FractionPair& pair, int W, const FreeProductOptions& opts) {
    require(W >= 2, ErrorKind::Window, "window must be at least 2: theta_0 reads coordinates 0 and 1");
    FreeProductSystem sys;
    sys.W = W;
    sys.pair = pair;
    sys.lambda0 = opts.lambda0 ? opts.lambda0 : pair.k;
    require(sys.lambda0 >= 2 && sys.lambda0 <= conformal::kMaxGroupOrder, ErrorKind::InvalidInput,
            "|Lambda_0| must lie in [2, 64]");
    sys.model1 = realizable::explicit_cocycle({pair.prefactor_block(1)});
    sys.model2 = realizable::explicit_cocycle({pair.prefactor_block(2)});
    auto append = [](realizable::RealizableCocycle& m, const std::optional<realizable::RealizableCocycle>& extra) {
        if (!extra) return;
        for (const auto& s : extra->stages) {
            m.stages.push_back(s);
            m.bases.push_back(s.a);
        }
    };
    append(sys.model1, opts.zeta1);
    append(sys.model2, opts.zeta2);
    return sys;
}

double theta_rn_derivative(const FreeProductSystem& sys, double beta, const FPCylinder& cell) {
    require(sys.in_window(cell), ErrorKind::Window, "cell lies outside the window");
    const double lq = std::log(static_cast<double>(sys.lambda0));
    switch (sys.region(cell)) {
        case Region::Y0: return 1.0;
        case Region::Y1:
            require(cell.y.count(0), ErrorKind::Window, "cell does not fix y_0");
            return std::exp(-lq - sys.log_phi_model(1, beta) + beta * sys.log_H(1, cell.y.at(0)));
        case Region::Y2:
            require(cell.z.count(0), ErrorKind::Window, "cell does not fix z_0");
            return std::exp(lq - sys.log_phi_model(2, beta) + beta * sys.log_H(2, cell.z.at(0)));
    }
    return 1.0;
}

SpectrumReport solve_fraction_condition(const realizable::FractionPair& pair, int which, double R, double tol,
                                        std::size_t grid_n) {
    require(which == 1 || which == 2, ErrorKind::InvalidInput, "fraction index must be 1 or 2");
    return solve_zero_set([&pair, which](double b) { return pair.condition_defect(which, b); }, true, R, tol, grid_n);
}

SpectrumReport solve_free_product_spectrum(const realizable::FractionPair& pair, double R, double tol,
                                           std::size_t grid_n) {
    return solve_zero_set(
        [&pair](double b) {
            return std::max(std::abs(pair.condition_defect(1, b)), std::abs(pair.condition_defect(2, b)));
        },
        false, R, tol, grid_n);
}

// ---- dummy extension -------------------------------------------------------

DummyExtensionReport dummy_extension_check(std::uint64_t p, int N, const FreeProductSystem& sys,
                                           const SpectrumReport& pair_spectrum, const std::vector<double>& betas,
                                           double tol) {
    require(padic::is_odd_prime(p), ErrorKind::InvalidInput, "p must be an odd prime");
    require(N >= 1, ErrorKind::InvalidInput, "N must be >= 1");
    DummyExtensionReport rep;
    rep.p = p;
    rep.N = N;
    rep.group_order = padic::sl2_order(p, N);
    require(rep.group_order <= padic::kClosureCap, ErrorKind::SizeCap, "quotient too large to enumerate");
    rep.spectrum = pair_spectrum;

    std::vector<padic::Mat2Mod> gens;
    for (const char* name : {"g1", "g2"}) {
        const auto g = padic::reduce(padic::generator(name), p, N);
        gens.push_back(g);
        gens.push_back(g.inverse());
    }
    // orbit of the identity under left translation
    std::vector<padic::Mat2Mod> orbit{padic::reduce(padic::Mat2::identity(), p, N)};
    std::unordered_set<std::uint64_t> seen{orbit[0].key()};
    for (std::size_t head = 0; head < orbit.size(); ++head)
        for (const auto& g : gens) {
            const auto y = g * orbit[head];
            if (seen.insert(y.key()).second) orbit.push_back(y);
        }
    rep.orbit_size = orbit.size();
    rep.transitive = rep.orbit_size == rep.group_order;

    // lifted relation on (z-cell x Y-cell): uniform on Z is translation invariant, so the
    // Radon-Nikodym value must equal the theta one
    const auto g1 = gens[0];
    const auto g1inv = gens[1];
    const double log_uniform = -std::log(static_cast<double>(orbit.size()));
    auto cells_of = [&](int which) {
        WreathSystem w{sys.model(which)};
        std::vector<Cell> out;
        const auto ext = w.cell_extents();
        const std::size_t count = std::min<std::size_t>(w.cell_count(), 64);
        for (std::size_t idx = 0; idx < count; ++idx) {
            Cell c(ext.size());
            std::size_t r = idx;
            for (std::size_t d = ext.size(); d-- > 0;) {
                c[d] = r % ext[d];
                r /= ext[d];
            }
            out.push_back(c);
        }
        return out;
    };
    const auto ycells = cells_of(1), zcells = cells_of(2);
    for (double beta : betas)
        for (int x0 = 0; x0 < sys.lambda0; ++x0)
            for (int x1 = 0; x1 < sys.lambda0; ++x1)
                for (const auto& yc : ycells)
                    for (const auto& zc : zcells) {
                        FPCylinder C{{{0, x0}, {1, x1}}, {{0, yc}}, {{0, zc}}};
                        const double expect = theta_rn_derivative(sys, beta, C);
                        const double lc = sys.log_measure(beta, C), lpre = sys.log_measure(beta, sys.theta_inverse(C));
                        for (const auto& z : orbit) {
                            const auto zpre = g1inv * z;
                            const double mz = seen.count(zpre.key()) ? log_uniform : kNegInf;
                            const double lifted = std::exp((mz + lpre) - (log_uniform + lc));
                            rep.max_lift_defect = std::max(rep.max_lift_defect, std::abs(lifted / expect - 1.0));
                            ++rep.cells_checked;
                        }
                    }
    (void)g1;
    rep.pass = rep.transitive && rep.max_lift_defect <= tol;
    return rep;
}

nlohmann::json to_json(const DummyExtensionReport& r) {
    return {{"p", r.p},
            {"N", r.N},
            {"group_order", r.group_order},
            {"orbit_size", r.orbit_size},
            {"transitive", r.transitive},
            {"max_lift_defect", dec(r.max_lift_defect)},
            {"cells_checked", r.cells_checked},
            {"spectrum", to_json(r.spectrum)},
            {"pass", r.pass}};
}

}  // namespace kms::spectra
