#include "kmsspec/pipeline.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "kmsspec/conformal.hpp"
#include "kmsspec/growth.hpp"
#include "kmsspec/padic.hpp"
#include "kmsspec/realizable.hpp"
#include "kmsspec/spectra.hpp"

namespace kms::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Wreath: return "wreath";
        case Mode::FreeProduct: return "free-product";
        case Mode::Growth: return "growth";
        case Mode::Padic: return "padic";
    }
    return "?";
}

// ---- config ------------------------------------------------------------------

namespace {

double real_field(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    require(v.is_string(), ErrorKind::InvalidInput, std::string("'") + key + "' must be a decimal string");
    return parse_dec(v.get<std::string>());
}

template <class T>
T int_field(const json& j, const char* key, T dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    require(v.is_number_integer(), ErrorKind::InvalidInput, std::string("'") + key + "' must be an integer");
    return v.get<T>();
}

Mode mode_from(const std::string& s) {
    if (s == "wreath") return Mode::Wreath;
    if (s == "free-product") return Mode::FreeProduct;
    if (s == "growth") return Mode::Growth;
    if (s == "padic") return Mode::Padic;
    throw Error(ErrorKind::InvalidInput, "unknown mode '" + s + "'");
}

json reals(const std::vector<double>& xs) {
    auto a = json::array();
    for (double x : xs) a.push_back(dec(x));
    return a;
}

}  // namespace

RunConfig parse_config(const json& j) {
    require(j.is_object(), ErrorKind::InvalidInput, "config must be a JSON object");
    require(j.contains("mode"), ErrorKind::InvalidInput, "config needs 'mode'");
    RunConfig c;
    c.mode = mode_from(j.at("mode").get<std::string>());
    if (j.contains("K")) c.K = spectra::closed_set_from_json(j.at("K"));
    c.t = real_field(j, "t", c.t);
    c.k = int_field(j, "k", c.k);
    c.lambda0_order = int_field(j, "lambda0_order", c.lambda0_order);
    c.stages = int_field(j, "stages", c.stages);
    c.build_R = real_field(j, "build_R", c.build_R);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        c.grid.R = real_field(g, "R", c.grid.R);
        c.grid.n = int_field<std::size_t>(g, "n", c.grid.n);
        c.grid.tol = real_field(g, "tol", c.grid.tol);
    }
    if (j.contains("growth")) {
        const auto& g = j.at("growth");
        auto& s = c.growth;
        s.dim = int_field(g, "dim", s.dim);
        if (g.contains("preset")) s.preset = g.at("preset").get<std::string>();
        s.amp = real_field(g, "amp", s.amp);
        s.c = real_field(g, "c", s.c);
        s.M = int_field(g, "M", s.M);
        s.horizon = int_field(g, "horizon", s.horizon);
        s.census_radius = int_field(g, "census_radius", s.census_radius);
        if (g.contains("s")) {
            s.s.clear();
            for (const auto& v : g.at("s")) s.s.push_back(parse_dec(v.get<std::string>()));
        }
        s.beta = real_field(g, "beta", s.beta);
        s.x = int_field(g, "x", s.x);
        if (g.contains("expect")) s.expect = g.at("expect").get<std::string>();
    }
    if (j.contains("padic")) {
        const auto& g = j.at("padic");
        auto& s = c.padic;
        s.p = int_field<std::uint64_t>(g, "p", s.p);
        if (g.contains("N")) s.N = g.at("N").get<std::vector<int>>();
        s.max_len = int_field(g, "max_len", s.max_len);
        s.h_lo = int_field(g, "h_lo", s.h_lo);
        s.h_hi = int_field(g, "h_hi", s.h_hi);
    }
    return c;
}

json to_json(const RunConfig& c) {
    json j{{"mode", to_string(c.mode)},
           {"grid", {{"R", dec(c.grid.R)}, {"n", c.grid.n}, {"tol", dec(c.grid.tol)}}}};
    if (c.K) j["K"] = spectra::to_json(*c.K);
    switch (c.mode) {
        case Mode::Wreath:
            j["t"] = dec(c.t);
            j["stages"] = c.stages;
            j["build_R"] = dec(c.build_R);
            break;
        case Mode::FreeProduct:
            j["k"] = c.k;
            j["lambda0_order"] = c.lambda0_order ? c.lambda0_order : 2 * c.k;
            break;
        case Mode::Growth: {
            const auto& s = c.growth;
            j["growth"] = {{"dim", s.dim},     {"preset", s.preset},   {"amp", dec(s.amp)},
                           {"c", dec(s.c)},    {"M", s.M},             {"horizon", s.horizon},
                           {"s", reals(s.s)},  {"beta", dec(s.beta)},  {"x", s.x},
                           {"census_radius", s.census_radius},         {"expect", s.expect}};
            break;
        }
        case Mode::Padic:
            j["padic"] = {{"p", c.padic.p}, {"N", c.padic.N}, {"max_len", c.padic.max_len},
                          {"h_lo", c.padic.h_lo}, {"h_hi", c.padic.h_hi}};
            break;
    }
    return j;
}

void validate(const RunConfig& c) {
    require(c.grid.R > 0 && std::isfinite(c.grid.R), ErrorKind::InvalidInput, "grid.R must be positive and finite");
    require(c.grid.n >= 3, ErrorKind::InvalidInput, "grid.n must be >= 3");
    require(c.grid.tol > 0, ErrorKind::InvalidInput, "grid.tol must be positive");
    const bool needs_K = c.mode == Mode::Wreath || c.mode == Mode::FreeProduct;
    if (needs_K) {
        require(c.K.has_value(), ErrorKind::InvalidInput, "mode " + to_string(c.mode) + " needs 'K'");
        require(!c.K->empty(), ErrorKind::InvalidInput, "K must be nonempty");
        const bool has0 = c.K->contains(0.0);
        if (c.mode == Mode::Wreath)
            require(has0, ErrorKind::InvalidInput, "wreath mode needs 0 in K; use free-product for sets omitting 0");
        else
            require(!has0, ErrorKind::InvalidInput, "free-product mode needs 0 outside K; use wreath for sets containing 0");
    }
    if (c.mode == Mode::Wreath) {
        require(c.t > 1, ErrorKind::InvalidInput, "t must exceed 1");
        require(c.stages >= 1 && c.stages <= 8, ErrorKind::InvalidInput, "stages must lie in [1, 8]");
    }
    if (c.mode == Mode::FreeProduct) {
        require(c.k >= 2, ErrorKind::InvalidInput, "k must be >= 2");
        const int q = c.lambda0_order ? c.lambda0_order : 2 * c.k;
        require(q >= 2 * c.k && q <= conformal::kMaxGroupOrder, ErrorKind::InvalidInput,
                "lambda0_order must lie in [2k, 64]");
    }
    if (c.mode == Mode::Growth) {
        require(c.growth.horizon >= 2, ErrorKind::InvalidInput, "growth.horizon must be >= 2");
        require(c.growth.dim == 1, ErrorKind::InvalidInput, "cocycle presets are defined on Z (dim 1)");
        for (double s : c.growth.s) require(s > 0, ErrorKind::InvalidInput, "growth.s entries must be positive");
    }
    if (c.mode == Mode::Padic) {
        require(padic::is_odd_prime(c.padic.p), ErrorKind::InvalidInput, "padic.p must be an odd prime");
        require(!c.padic.N.empty(), ErrorKind::InvalidInput, "padic.N must list at least one level");
        require(c.padic.max_len >= 1 && c.padic.max_len <= 10, ErrorKind::InvalidInput, "padic.max_len must lie in [1, 10]");
    }
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorKind::Numeric,
            "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// ---- shared checks -----------------------------------------------------------

namespace {

const std::vector<double> kConformalBetas{-3, -1, 0, 1, 3};
const std::vector<double> kRnBetas{-2, 0, 1};
constexpr double kClassTol = 1e-10;
constexpr double kRnTol = 1e-10;

// Grid points of K: members, plus the nearest grid points of each isolated point.
std::vector<std::size_t> oracle_trace(const spectra::ClosedSetSpec& K, const GridSpec& g) {
    const auto xs = linspace(-g.R, g.R, g.n);
    const double reach = spectra::trace_reach(xs[1] - xs[0]);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        bool hit = K.distance(xs[i]) == 0.0;
        for (double p : K.points()) hit = hit || std::abs(xs[i] - p) <= reach;
        if (hit) out.push_back(i);
    }
    return out;
}

Certificate trace_certificate(const std::string& name, const spectra::SpectrumReport& rep,
                              const spectra::ClosedSetSpec& K, const GridSpec& g) {
    const auto got = rep.grid_trace(), want = oracle_trace(K, g);
    Certificate c{name, got == want, {{"reported_points", got.size()}, {"oracle_points", want.size()}}};
    if (!c.pass) {
        std::size_t i = 0;
        while (i < got.size() && i < want.size() && got[i] == want[i]) ++i;
        const auto xs = linspace(-g.R, g.R, g.n);
        const std::size_t at = i < got.size() ? got[i] : want[i];
        c.detail["first_difference_beta"] = dec(xs[std::min(at, xs.size() - 1)]);
    }
    return c;
}

// Stored class-level measures of a factorized stage: ln nu_beta(class) per side.
json class_measures(const exprat::ClassSide& side) {
    json per_beta = json::array();
    for (double b : kConformalBetas) {
        const double lt = side.log_total(b);
        auto row = json::array();
        for (std::size_t i = 0; i < side.classes.size(); ++i)
            row.push_back(dec(side.class_log_mult(i) + b * side.classes[i].log_base - lt));
        per_beta.push_back(row);
    }
    return per_beta;
}

// Atoms of one class all carry mass ν(class)/mult; conformality between atoms of classes i and j
// under any element carrying one to the other reads ν_j/m_j = ν_i/m_i (base_j/base_i)^beta.
double class_conformality_defect(const exprat::ClassSide& side, const json& stored) {
    double worst = 0;
    double mass_defect = 0;
    for (std::size_t bi = 0; bi < kConformalBetas.size(); ++bi) {
        const double b = kConformalBetas[bi];
        const auto& row = stored.at(bi);
        require(row.size() == side.classes.size(), ErrorKind::Verification, "stored class measure has the wrong size");
        std::vector<double> lw;
        for (const auto& v : row) lw.push_back(parse_dec(v.get<std::string>()));
        const double ref = lw[0] - side.class_log_mult(0) - b * side.classes[0].log_base;
        for (std::size_t i = 1; i < lw.size(); ++i) {
            const double here = lw[i] - side.class_log_mult(i) - b * side.classes[i].log_base;
            worst = std::max(worst, std::abs(std::expm1(here - ref)));
        }
        mass_defect = std::max(mass_defect, std::abs(std::exp(log_sum_exp(lw)) - 1.0));
    }
    return std::max(worst, mass_defect);
}

conformal::TruncatedProductSystem truncation_of(const std::vector<conformal::FiniteConformalBlock>& blocks) {
    conformal::TruncatedProductSystem sys;
    sys.blocks = blocks;
    return sys;
}

std::vector<conformal::Generator> all_generators(const conformal::TruncatedProductSystem& sys) {
    std::vector<conformal::Generator> gens;
    for (std::size_t b = 0; b < sys.blocks.size(); ++b)
        for (int e = 0; e < sys.blocks[b].group.order; ++e) gens.push_back(conformal::Generator::in_block(sys, b, e));
    return gens;
}

json explicit_measures(const std::vector<conformal::FiniteConformalBlock>& blocks) {
    auto per_beta = json::array();
    for (double b : kConformalBetas) {
        const auto m = conformal::joint_measure(conformal::product_measure(blocks, b));
        per_beta.push_back(reals(m.weights()));
    }
    return per_beta;
}

double explicit_conformality_defect(const std::vector<conformal::FiniteConformalBlock>& blocks, const json& stored,
                                    bool& pass) {
    const auto sys = truncation_of(blocks);
    const auto gens = all_generators(sys);
    double worst = 0;
    pass = true;
    for (std::size_t bi = 0; bi < kConformalBetas.size(); ++bi) {
        std::vector<double> w;
        for (const auto& v : stored.at(bi)) w.push_back(parse_dec(v.get<std::string>()));
        require(w.size() == sys.configurations(), ErrorKind::Verification, "stored measure has the wrong size");
        // no renormalization: a perturbed weight must stay perturbed
        double sum = 0;
        for (double x : w) sum += x;
        std::vector<double> unit = w;
        for (double& x : unit) x /= sum;
        const auto rep = conformal::check_conformality(sys, conformal::ProbVector(unit), kConformalBetas[bi], gens, 1e-12);
        worst = std::max({worst, rep.max_defect, std::abs(sum - 1.0)});
        pass = pass && rep.pass && std::abs(sum - 1.0) <= 1e-12;
    }
    return worst;
}

Certificate conformality_certificate(const realizable::RealizableCocycle& coc, const json& stored) {
    double worst = 0;
    bool pass = true;
    for (std::size_t k = 0; k < coc.stages.size(); ++k) {
        const auto& st = coc.stages[k];
        const auto& sj = stored.at(k);
        if (st.factorized) {
            const double d = std::max(class_conformality_defect(st.system.s1, sj.at("side1")),
                                      class_conformality_defect(st.system.s2, sj.at("side2")));
            worst = std::max(worst, d);
            pass = pass && d <= kClassTol;
        } else {
            bool ok = false;
            worst = std::max(worst, explicit_conformality_defect({st.block}, sj.at("joint"), ok));
            pass = pass && ok;
        }
    }
    return {"conformality", pass, {{"max_defect", dec(worst)}, {"betas", reals(kConformalBetas)}}};
}

json stage_measures(const realizable::RealizableCocycle& coc) {
    auto out = json::array();
    for (const auto& st : coc.stages) {
        if (st.factorized)
            out.push_back({{"side1", class_measures(st.system.s1)}, {"side2", class_measures(st.system.s2)}});
        else
            out.push_back({{"joint", explicit_measures({st.block})}});
    }
    return out;
}

Certificate identity_certificate(const realizable::RealizableCocycle& coc) {
    double worst = 0;
    bool exact = true;
    std::size_t points = 0;
    for (const auto& st : coc.stages) {
        if (!st.factorized) continue;
        const auto id = exprat::check_identities(st.system, coc.R, 10000);
        worst = std::max({worst, id.max_eta1, id.max_eta2, id.max_integral});
        exact = exact && id.counts_exact;
        points = id.points;
    }
    return {"identities", worst <= 1e-10 && exact,
            {{"max_residual", dec(worst)}, {"counts_exact", exact}, {"points", points}, {"R", dec(coc.R)}}};
}

// Deterministic cell sample: every index of a stage coordinate is hit if the extent is small.
std::vector<spectra::Cell> sample_cells(const spectra::WreathSystem& sys, std::size_t n) {
    const auto ext = sys.cell_extents();
    std::vector<spectra::Cell> out;
    for (std::size_t i = 0; i < n; ++i) {
        spectra::Cell c(ext.size());
        for (std::size_t d = 0; d < ext.size(); ++d) c[d] = (i * (2 * d + 1) + d * 7919 + (i * i) % 104729) % ext[d];
        out.push_back(std::move(c));
    }
    return out;
}

Certificate shift_rn_certificate(const realizable::RealizableCocycle& coc) {
    const auto sys = spectra::assemble_wreath(coc);
    const auto cells = sample_cells(sys, 256);
    double worst = 0;
    std::size_t checked = 0;
    for (double b : kRnBetas) {
        const double lphi = sys.log_phi(b);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& left = cells[(i + 1) % cells.size()];
            const auto& c0 = cells[i];
            const auto& right = cells[(i + 2) % cells.size()];
            // C fixes coordinates -1, 0, 1; its translate by +1 fixes 0, 1, 2 with the same values
            auto lnu = [&](const spectra::Cell& x) { return sys.log_nu(b, x); };
            auto leta = [&](const spectra::Cell& x) { return lnu(x) + b * sys.log_H(x) - lphi; };
            const double lc = leta(left) + leta(c0) + lnu(right);
            const double lt = leta(left) + lnu(c0) + lnu(right);
            const double rn = spectra::shift_rn_derivative(sys, b, c0);
            worst = std::max(worst, std::abs(std::exp(lt - lc) / rn - 1.0));
            ++checked;
        }
    }
    return {"shift_rn", worst <= kRnTol, {{"max_rel_defect", dec(worst)}, {"cylinders", checked}}};
}

Certificate theta_rn_certificate(const spectra::FreeProductSystem& sys) {
    const int q = sys.lambda0;
    const std::size_t c1 = spectra::WreathSystem{sys.model1}.cell_count(),
                      c2 = spectra::WreathSystem{sys.model2}.cell_count();
    const auto e1 = spectra::WreathSystem{sys.model1}.cell_extents(),
               e2 = spectra::WreathSystem{sys.model2}.cell_extents();
    auto decode = [](std::size_t idx, const std::vector<std::size_t>& ext) {
        spectra::Cell c(ext.size());
        for (std::size_t d = ext.size(); d-- > 0;) {
            c[d] = idx % ext[d];
            idx /= ext[d];
        }
        return c;
    };
    double worst = 0;
    std::size_t checked = 0;
    // window 2: x on -1..1, y and z on -1..0
    for (double b : kRnBetas)
        for (int xm = 0; xm < q; ++xm)
            for (int x0 = 0; x0 < q; ++x0)
                for (int x1 = 0; x1 < q; ++x1)
                    for (std::size_t ya = 0; ya < c1 * c1; ++ya)
                        for (std::size_t za = 0; za < c2 * c2; ++za) {
                            spectra::FPCylinder C;
                            C.x = {{-1, xm}, {0, x0}, {1, x1}};
                            C.y = {{-1, decode(ya / c1, e1)}, {0, decode(ya % c1, e1)}};
                            C.z = {{-1, decode(za / c2, e2)}, {0, decode(za % c2, e2)}};
                            const double ratio = std::exp(sys.log_measure(b, sys.theta_inverse(C)) - sys.log_measure(b, C));
                            worst = std::max(worst, std::abs(ratio / spectra::theta_rn_derivative(sys, b, C) - 1.0));
                            ++checked;
                        }
    return {"theta_rn", worst <= kRnTol, {{"max_rel_defect", dec(worst)}, {"cylinders", checked}}};
}

std::string csv_row(double b, const std::optional<double>& phi, const std::optional<double>& p1,
                    const std::optional<double>& p2) {
    std::string s = dec(b);
    for (const auto* v : {&phi, &p1, &p2}) s += "," + (v->has_value() ? dec(**v) : std::string());
    return s + "\n";
}

template <class F>
auto timed(RunResult& r, const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            r.timings.push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
        } else {
            auto v = f();
            r.timings.push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
            return v;
        }
    } catch (const Error& e) {
        throw Error(e.kind(), "stage " + stage + ": " + e.what());
    }
}

realizable::BuildOptions wreath_build_options(const RunConfig& cfg) {
    realizable::BuildOptions o;
    o.stages = cfg.stages;
    o.R = cfg.build_R;
    o.zeta_tail = [](double R) { return spectra::target_zeta_tail(R); };
    return o;
}

realizable::FractionPair pair_of(const RunConfig& cfg) {
    return realizable::fraction_pair(*cfg.K, cfg.k, cfg.lambda0_order ? cfg.lambda0_order : 2 * cfg.k);
}

std::vector<conformal::FiniteConformalBlock> prefactor_blocks(const realizable::FractionPair& p) {
    return {p.prefactor_block(1), p.prefactor_block(2)};
}

// ---- modes ---------------------------------------------------------------------

void run_wreath(const RunConfig& cfg, RunResult& r) {
    const auto& K = *cfg.K;
    const Fn phi = spectra::target_phi_from_set(K, cfg.t);
    const auto tc = timed(r, "target", [&] { return spectra::check_target(K, cfg.t, cfg.grid.R, cfg.grid.n); });
    r.certificates.push_back({"target", tc.max_correction <= 0.5 && tc.zero_set_matches,
                              {{"max_correction", dec(tc.max_correction)},
                               {"correction_at_R", dec(tc.correction_at_R)},
                               {"zero_set_matches", tc.zero_set_matches}}});

    const auto coc = timed(r, "realize", [&] {
        return realizable::build_realizable(spectra::target_zeta_from_set(K), cfg.t, wreath_build_options(cfg));
    });
    r.certificates.push_back({"realization", coc.all_bounds_hold(),
                              {{"certified_error", dec(coc.certified_error)},
                               {"bound", dec(coc.stage_bounds.back())},
                               {"tail_bound", dec(coc.tail_bound)},
                               {"R", dec(coc.R)}}});
    r.certificates.push_back(timed(r, "identities", [&] { return identity_certificate(coc); }));
    r.stored["measures"] = stage_measures(coc);
    r.certificates.push_back(conformality_certificate(coc, r.stored["measures"]));
    r.certificates.push_back(timed(r, "shift_rn", [&] { return shift_rn_certificate(coc); }));

    const auto rep = timed(r, "spectrum", [&] { return spectra::solve_spectrum(phi, cfg.grid.R, cfg.grid.tol, cfg.grid.n); });
    r.certificates.push_back(trace_certificate("spectrum", rep, K, cfg.grid));

    r.report["spectrum"] = spectra::to_json(rep);
    r.report["cocycle"] = {{"stages", coc.stages.size()},
                           {"bases", reals(coc.bases)},
                           {"stage_errors", reals(coc.stage_errors)},
                           {"stage_bounds", reals(coc.stage_bounds)},
                           {"certified_error", dec(coc.certified_error)}};
    r.files["cocycle.json"] = realizable::to_json(coc).dump() + "\n";

    const auto xs = linspace(-cfg.grid.R, cfg.grid.R, cfg.grid.n);
    const auto ph = eval_grid(phi, xs);
    std::string csv = "beta,phi,phi1,phi2\n";
    for (std::size_t i = 0; i < xs.size(); ++i) csv += csv_row(xs[i], ph[i], std::nullopt, std::nullopt);
    r.files["samples.csv"] = csv;
}

void run_free_product(const RunConfig& cfg, RunResult& r) {
    const auto& K = *cfg.K;
    const auto pair = timed(r, "pair", [&] { return pair_of(cfg); });
    const auto chk = pair.check(cfg.grid.R, cfg.grid.n);
    const bool zero_ok = std::abs(chk.phi1_at_zero - 1) <= 1e-12 && std::abs(chk.phi2_at_zero - 1) <= 1e-12;
    r.certificates.push_back({"fraction_checks", chk.all() && zero_ok,
                              {{"b_inequality", chk.b_inequality},
                               {"a_inequality", chk.a_inequality},
                               {"a_delta", chk.a_delta},
                               {"q_bound", chk.q_bound},
                               {"phi1_at_zero", dec(chk.phi1_at_zero)},
                               {"phi2_at_zero", dec(chk.phi2_at_zero)}}});

    const auto blocks = prefactor_blocks(pair);
    r.stored["measures"] = explicit_measures(blocks);
    {
        bool ok = false;
        const double d = explicit_conformality_defect(blocks, r.stored["measures"], ok);
        r.certificates.push_back({"conformality", ok, {{"max_defect", dec(d)}, {"betas", reals(kConformalBetas)}}});
    }
    const auto sys = spectra::assemble_free_product(pair, 2);
    r.certificates.push_back(timed(r, "theta_rn", [&] { return theta_rn_certificate(sys); }));

    const auto rep = timed(r, "spectrum", [&] {
        return spectra::solve_free_product_spectrum(pair, cfg.grid.R, cfg.grid.tol, cfg.grid.n);
    });
    r.certificates.push_back(trace_certificate("spectrum", rep, K, cfg.grid));
    for (int which : {1, 2}) {
        const auto ri = spectra::solve_fraction_condition(pair, which, cfg.grid.R, cfg.grid.tol, cfg.grid.n);
        r.certificates.push_back(trace_certificate("condition_" + std::to_string(which), ri, K, cfg.grid));
    }
    const auto ext = timed(r, "extension", [&] { return spectra::dummy_extension_check(3, 1, sys, rep, kRnBetas); });
    r.certificates.push_back({"extension", ext.pass,
                              {{"group_order", ext.group_order},
                               {"orbit_size", ext.orbit_size},
                               {"max_lift_defect", dec(ext.max_lift_defect)}}});

    r.report["spectrum"] = spectra::to_json(rep);
    r.report["pair"] = realizable::to_json(pair);
    r.files["pair.json"] = realizable::to_json(pair).dump() + "\n";

    const auto xs = linspace(-cfg.grid.R, cfg.grid.R, cfg.grid.n);
    const auto p1 = eval_grid([&](double b) { return pair.phi1(b); }, xs);
    const auto p2 = eval_grid([&](double b) { return pair.phi2(b); }, xs);
    std::string csv = "beta,phi,phi1,phi2\n";
    for (std::size_t i = 0; i < xs.size(); ++i) csv += csv_row(xs[i], std::nullopt, p1[i], p2[i]);
    r.files["samples.csv"] = csv;
}

void run_growth(const RunConfig& cfg, RunResult& r) {
    const auto& gs = cfg.growth;
    const auto model = growth::model_from_preset(gs.preset, gs.amp, gs.c, gs.M);
    timed(r, "precheck", [&] { growth::require_subexponential(model.group, gs.horizon); });
    const auto census = growth::ball_census(model.group, gs.census_radius);
    std::string census_csv = "k,sphere_size\n";
    for (std::size_t k = 0; k < census.sphere_sizes.size(); ++k)
        census_csv += std::to_string(k) + "," + std::to_string(census.sphere_sizes[k]) + "\n";
    r.files["census.csv"] = census_csv;
    r.report["census"] = growth::to_json(census);

    const double cdef = growth::cocycle_defect(model, 7, 10000);
    r.certificates.push_back({"cocycle_identity", cdef <= 1e-10, {{"max_defect", dec(cdef)}, {"triples", 10000}}});

    const auto cls = timed(r, "classify", [&] { return growth::classify_model(model, gs.horizon); });
    r.report["classification"] = growth::to_json(cls);
    const bool expect_ok = gs.expect.empty() || gs.expect == growth::to_string(cls.shape);
    r.certificates.push_back({"classifier", expect_ok, {{"shape", growth::to_string(cls.shape)}, {"expect", gs.expect}}});

    const auto plus = growth::limsup_ratio(model, gs.x, 1.0, gs.horizon);
    const auto minus = growth::limsup_ratio(model, gs.x, -1.0, gs.horizon);
    std::string lim_csv = "n,sup_plus,sup_minus\n";
    for (std::size_t n = 0; n < plus.tail.size(); ++n)
        lim_csv += std::to_string(n) + "," + dec(plus.tail[n]) + "," + dec(minus.tail[n]) + "\n";
    r.files["limsup.csv"] = lim_csv;

    std::string def_csv = "s,h,f,defect,bound,slack\n";
    auto nets = json::array();
    bool nets_ok = true;
    timed(r, "measure_nets", [&] {
        for (double s : gs.s) {
            const auto net = growth::build_measure_net(model, gs.x, gs.beta, s);
            const auto cert = growth::certify_measure_net(model, net);
            nets_ok = nets_ok && cert.pass;
            double worst = 0;
            for (const auto& row : cert.rows) {
                def_csv += dec(s) + "," + row.h + "," + row.f + "," + dec(row.measured) + "," + dec(row.bound) + "," +
                           dec(row.slack) + "\n";
                if (row.bound + row.slack > 0) worst = std::max(worst, row.measured / (row.bound + row.slack));
            }
            nets.push_back({{"s", dec(s)}, {"R", net.R}, {"atoms", net.atoms.size()}, {"tail_mass", dec(net.tail_mass)},
                            {"mass_defect", dec(cert.mass_defect)}, {"max_defect_over_bound", dec(worst)},
                            {"pass", cert.pass}});
        }
    });
    r.files["defects.csv"] = def_csv;
    r.report["measure_nets"] = nets;
    r.certificates.push_back({"measure_net", nets_ok, {{"schedule", reals(gs.s)}}});

    const auto om = growth::omega_mu(model, conformal::ProbVector::uniform(static_cast<std::size_t>(model.M)));
    r.report["omega_mu"] = growth::to_json(om);
    r.certificates.push_back({"omega_mu", om.max_additivity_defect <= 1e-9,
                              {{"max_additivity_defect", dec(om.max_additivity_defect)}}});
}

void run_padic(const RunConfig& cfg, RunResult& r) {
    const auto& ps = cfg.padic;
    const std::vector<padic::Mat2> gens{padic::generator("g1"), padic::generator("g2")};
    auto closures = json::array();
    for (int N : ps.N) {
        const auto c = timed(r, "closure_" + std::to_string(N), [&] { return padic::subgroup_closure_mod(ps.p, N, gens); });
        closures.push_back({{"p", c.p}, {"N", c.N}, {"group_order", c.order}, {"expected_order", c.expected},
                            {"is_full", c.is_full}, {"divides", c.divides}});
        r.certificates.push_back({"closure_" + std::to_string(N), c.is_full && c.divides,
                                  {{"order", c.order}, {"expected", c.expected}}});
    }
    const auto f = timed(r, "freeness", [&] { return padic::freeness_suite(ps.max_len, ps.h_lo, ps.h_hi); });
    r.certificates.push_back({"freeness", f.all_nontrivial,
                              {{"words_checked", f.words_checked.str()}, {"max_len", f.max_len}, {"method", f.method}}});
    r.report["closures"] = closures;
    r.report["freeness"] = {{"words_checked", f.words_checked.str()}, {"evaluated", f.evaluated}, {"max_len", f.max_len},
                            {"h_lo", f.h_lo}, {"h_hi", f.h_hi}, {"alphabet_size", f.alphabet_size},
                            {"method", f.method}, {"all_nontrivial", f.all_nontrivial}};
    r.files["certificate.json"] = r.report.dump(2) + "\n";
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    validate(cfg);
    RunResult r;
    r.stored = json::object();
    r.report = {{"mode", to_string(cfg.mode)}, {"config_hash", sha256_hex(to_json(cfg).dump())}};
    switch (cfg.mode) {
        case Mode::Wreath: run_wreath(cfg, r); break;
        case Mode::FreeProduct: run_free_product(cfg, r); break;
        case Mode::Growth: run_growth(cfg, r); break;
        case Mode::Padic: run_padic(cfg, r); break;
    }
    r.pass = true;
    auto certs = json::array();
    for (const auto& c : r.certificates) {
        certs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        r.pass = r.pass && c.pass;
    }
    r.report["certificates"] = certs;
    r.report["pass"] = r.pass;
    r.files["report.json"] = r.report.dump(2) + "\n";
    return r;
}

json write_run(const RunConfig& cfg, const RunResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    json arts = json::object();
    for (const auto& [name, body] : r.files) {
        std::ofstream(dir / name, std::ios::binary) << body;
        arts[name] = {{"sha256", sha256_hex(body)}, {"bytes", body.size()}};
    }
    json timings = json::object();
    for (const auto& [k, v] : r.timings) timings[k] = dec(std::round(v * 1000) / 1000);
    auto certs = json::array();
    for (const auto& c : r.certificates) certs.push_back({{"name", c.name}, {"pass", c.pass}});
    json m{{"config", to_json(cfg)},
           {"config_hash", sha256_hex(to_json(cfg).dump())},
           {"artifacts", arts},
           {"stored", r.stored},
           {"certificates", certs},
           {"timings", timings},
           {"pass", r.pass}};
    std::ofstream(dir / "manifest.json", std::ios::binary) << m.dump(2) << "\n";
    return m;
}

// ---- verify --------------------------------------------------------------------

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Verification, "cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

VerifyResult verify(const fs::path& dir) {
    VerifyResult v;
    auto add = [&](Certificate c) {
        if (!c.pass && v.first_failure.empty()) v.first_failure = c.name;
        v.checks.push_back(std::move(c));
    };
    auto finish = [&] {
        v.pass = v.first_failure.empty();
        return v;
    };

    json m;
    try {
        m = json::parse(slurp(dir / "manifest.json"));
    } catch (const std::exception& e) {
        add({"manifest", false, {{"error", e.what()}}});
        return finish();
    }
    for (const auto& [name, meta] : m.at("artifacts").items()) {
        std::string body;
        bool ok = fs::exists(dir / name);
        if (ok) body = slurp(dir / name);
        ok = ok && body.size() == meta.at("bytes").get<std::size_t>() && sha256_hex(body) == meta.at("sha256").get<std::string>();
        add({"integrity:" + name, ok, json::object()});
    }
    if (!v.first_failure.empty()) return finish();

    const RunConfig cfg = parse_config(m.at("config"));
    add({"config_hash", sha256_hex(to_json(cfg).dump()) == m.at("config_hash").get<std::string>(), json::object()});
    if (!v.first_failure.empty()) return finish();

    // certificates from stored data first, so a tampered manifest fails at the certificate it breaks
    try {
        if (cfg.mode == Mode::Wreath) {
            const auto coc = realizable::cocycle_from_json(json::parse(slurp(dir / "cocycle.json")));
            add(conformality_certificate(coc, m.at("stored").at("measures")));
            add(identity_certificate(coc));
            add(shift_rn_certificate(coc));
            const Fn phi = spectra::target_phi_from_set(*cfg.K, cfg.t);
            double err = 0;
            for (double b : linspace(-coc.R, coc.R, coc.grid_n ? coc.grid_n : 4001))
                err = std::max(err, std::abs(phi(b) - coc.eval_psi_fast(b, coc.stages.size())));
            add({"realization", err <= coc.stage_bounds.back(), {{"grid_error", dec(err)}}});
        } else if (cfg.mode == Mode::FreeProduct) {
            const auto pair = pair_of(cfg);
            bool ok = false;
            const double d = explicit_conformality_defect(prefactor_blocks(pair), m.at("stored").at("measures"), ok);
            add({"conformality", ok, {{"max_defect", dec(d)}}});
            add(theta_rn_certificate(spectra::assemble_free_product(pair, 2)));
        }
    } catch (const Error& e) {
        add({"stored_data", false, {{"error", e.what()}}});
    }
    if (!v.first_failure.empty()) return finish();

    const RunResult again = run(cfg);
    for (const auto& [name, body] : again.files) add({"replay:" + name, slurp(dir / name) == body, json::object()});
    add({"replay:stored", again.stored == m.at("stored"), json::object()});
    for (const auto& c : again.certificates) add({"certificate:" + c.name, c.pass, c.detail});
    return finish();
}

}  // namespace kms::pipeline
