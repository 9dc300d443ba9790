#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kmsspec/closedset.hpp"
#include "kmsspec/common.hpp"
#include "kmsspec/realizable.hpp"

namespace kms::spectra {

// zeta(beta) = d(beta, K) / (2 (1 + beta^2)); needs 0 in K.
Fn target_zeta_from_set(const ClosedSetSpec& K);
// sup_{|beta| >= R} of the function above (R >= 1).
double target_zeta_tail(double R);
// phi = 1 + P_t zeta
Fn target_phi_from_set(const ClosedSetSpec& K, double t);

struct TargetCheck {
    double max_correction = 0.0;  // grid sup |phi - 1|
    double correction_at_R = 0.0; // max |phi - 1| at +-R
    bool zero_set_matches = false;  // phi == 1 exactly where d == 0
};
TargetCheck check_target(const ClosedSetSpec& K, double t, double R, std::size_t grid_n);

// ---- spectrum solving ------------------------------------------------------

struct SpectrumInterval {
    double lo = 0.0, hi = 0.0;
    bool clipped_lo = false, clipped_hi = false;  // touches -R / +R
};

// Half a cell plus slack: a root at a tangential zero is only located to about sqrt(machine eps).
inline double trace_reach(double spacing) { return spacing * (0.5 + 1e-3); }

struct SpectrumReport {
    std::vector<double> isolated_roots;
    std::vector<SpectrumInterval> flat_intervals;
    std::vector<double> near_misses;  // tol/100 < |defect| <= tol at a local minimum
    double tol = 0.0, strict_tol = 0.0;
    double R = 0.0, spacing = 0.0;
    std::size_t grid_n = 0;
    std::vector<std::string> warnings;

    // Grid points inside a reported interval or within trace_reach of a root.
    std::vector<std::size_t> grid_trace() const;
};

nlohmann::json to_json(const SpectrumReport& r);

// Zero set of a defect on [-R, R]. Signed defects also get the sign-change pass.
SpectrumReport solve_zero_set(const Fn& defect, bool is_signed, double R, double tol, std::size_t grid_n);
// {beta : phi(beta) = 1}
SpectrumReport solve_spectrum(const Fn& phi, double R, double tol, std::size_t grid_n);

// ---- wreath product --------------------------------------------------------

// Per-stage cell coordinates concatenated (see StageBlock::cell_rank).
using Cell = std::vector<std::size_t>;

// Coordinates lo, lo+1, ... of Y = X^Z.
struct WreathWindow {
    int lo = 0;
    std::vector<Cell> cells;
    bool has(int m) const { return m >= lo && m < lo + static_cast<int>(cells.size()); }
    const Cell& at(int m) const;
};

struct WreathSystem {
    realizable::RealizableCocycle cocycle;

    std::size_t cell_rank() const;
    std::vector<std::size_t> cell_extents() const;
    std::size_t cell_count() const;  // product of extents, saturating
    double log_phi(double beta) const;
    double log_H(const Cell& x) const;
    double log_nu(double beta, const Cell& x) const;
    // d eta / d nu = H^beta / phi
    double log_eta(double beta, const Cell& x) const;
    // Omega(n, x) for the Z-generator power n; needs the coordinates it reads.
    double omega_shift(int n, const WreathWindow& x) const;
    // Omega_1 on a coordinate n <= 0, Omega_0 on n > 0, for lambda acting on an explicit stage.
    double omega_lambda(int n, std::size_t stage, int lambda, const Cell& x) const;
    Cell act(std::size_t stage, int lambda, const Cell& x) const;
};

WreathSystem assemble_wreath(const realizable::RealizableCocycle& cocycle);

// d((-1) . mu_beta)/d mu_beta at any point whose coordinate 0 lies in x0
double shift_rn_derivative(const WreathSystem& sys, double beta, const Cell& x0);

inline constexpr std::size_t kMaxEnumeratedCells = 1u << 16;

struct FactorMeasures {
    std::vector<Cell> cells;
    conformal::ProbVector nu, eta;
    std::vector<double> log_H;
};
// Enumerates every cell; eta comes from cohomologous_transform of nu by ln H.
FactorMeasures factor_measures(const WreathSystem& sys, double beta);

// ---- free product ----------------------------------------------------------

// Cylinder in Lambda0^Z x X1^Z x X2^Z: fixed coordinates only.
struct FPCylinder {
    std::map<int, int> x;
    std::map<int, Cell> y, z;
    bool operator==(const FPCylinder& o) const = default;
};

enum class Region { Y0 = 0, Y1 = 1, Y2 = 2 };

struct FreeProductSystem {
    int lambda0 = 2;  // |Lambda_0|
    int W = 2;        // requested window; Lambda_0 coordinates run over -W .. W+1
    realizable::FractionPair pair;
    // realizing factors for phi_1 and phi_2: the prefactor block, then optional stages for 1 + P zeta_i
    realizable::RealizableCocycle model1, model2;

    const realizable::RealizableCocycle& model(int which) const;
    double log_phi_model(int which, double beta) const;
    double log_H(int which, const Cell& c) const;
    double log_nu(int which, double beta, const Cell& c) const;
    double log_eta(int which, double beta, const Cell& c) const;

    Region region(const FPCylinder& c) const;
    bool in_window(const FPCylinder& c) const;
    FPCylinder theta(const FPCylinder& c) const;
    FPCylinder theta_inverse(const FPCylinder& c) const;
    // Omega(a, .) on the cylinder
    double omega_a(const FPCylinder& c) const;
    double log_measure(double beta, const FPCylinder& c) const;
};

struct FreeProductOptions {
    int lambda0 = 0;  // 0: pair.k
    std::optional<realizable::RealizableCocycle> zeta1, zeta2;
};

FreeProductSystem assemble_free_product(const realizable::FractionPair& pair, int W,
                                        const FreeProductOptions& opts = {});

// d(theta_* mu_beta)/d mu_beta on the cylinder: 1, q^-1 phi1^-1 H1(y0)^beta, q phi2^-1 H2(z0)^beta
double theta_rn_derivative(const FreeProductSystem& sys, double beta, const FPCylinder& cell);

// Both conditions of the pair at once, as relative defects (see FractionPair::condition_defect).
SpectrumReport solve_free_product_spectrum(const realizable::FractionPair& pair, double R, double tol,
                                           std::size_t grid_n);
SpectrumReport solve_fraction_condition(const realizable::FractionPair& pair, int which, double R, double tol,
                                        std::size_t grid_n);

// ---- extension by a finite quotient of SL(2, Z_p) --------------------------

struct DummyExtensionReport {
    std::uint64_t p = 0;
    int N = 0;
    std::uint64_t group_order = 0;     // |SL(2, Z/p^N)|
    std::uint64_t orbit_size = 0;      // orbit of the identity under <g1, g2>
    bool transitive = false;
    double max_lift_defect = 0.0;      // |lifted RN - theta RN| over the checked cells
    std::size_t cells_checked = 0;
    SpectrumReport spectrum;
    bool pass = false;
};

DummyExtensionReport dummy_extension_check(std::uint64_t p, int N, const FreeProductSystem& sys,
                                           const SpectrumReport& pair_spectrum,
                                           const std::vector<double>& betas, double tol = 1e-10);

nlohmann::json to_json(const DummyExtensionReport& r);

}  // namespace kms::spectra
