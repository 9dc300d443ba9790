#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "kmsspec/closedset.hpp"
#include "kmsspec/common.hpp"
#include "kmsspec/conformal.hpp"
#include "kmsspec/exprational.hpp"

namespace kms::realizable {

// P(beta) = (a^beta - 1)/(a^beta + 1) = tanh(beta ln a / 2)
double mobius_eval(double a, double beta);

struct RatioBound {
    double C = 1.0;        // certified sup |P_n / P_next|
    double limit_zero = 1.0;
    double limit_inf = 1.0;
    std::size_t cells = 0;
};

RatioBound ratio_bound_detail(double a_n, double a_next);
inline double ratio_bound(double a_n, double a_next) { return ratio_bound_detail(a_n, a_next).C; }

struct Schedule {
    enum Kind { InverseSquare, Geometric };
    Kind kind = InverseSquare;
    double q = 0.5;  // geometric ratio
    // a_n for n >= 1; a_1 = a.
    double at(double a, int n) const;
};

// One stage of the product: either a partitioned class system from realize_block or, for a vanishing
// residual, an explicit block with H = 1.
struct StageBlock {
    int k = 0;
    double a = 2.0;  // H takes values a, 1/a, 1
    double C = 1.0;
    double eps = 0.0;
    double R = 0.0;
    bool factorized = true;
    exprat::PartitionedBlockSystem system;
    conformal::FiniteConformalBlock block;
    double fit_error_plus = 0.0, fit_error_minus = 0.0;
    double approx_error = 0.0;  // grid sup |f_k - zeta_k|
    double f_tail = 0.0;
    std::size_t first_j = 1, last_j = 1;

    double log_integral(double beta) const;  // ln int H^beta d mu_beta, from the realized measure
    double zeta(double beta) const;          // eta1 - eta2, fast form

    // Cells on which both the measure and H are constant: atoms of an explicit block,
    // (class of s1, class of s2) pairs of a factorized stage.
    std::size_t cell_rank() const { return factorized ? 2 : 1; }
    std::size_t cell_extent(std::size_t d) const;
    double log_cell_measure(double beta, const std::size_t* idx) const;  // ln nu_beta(cell)
    double log_cell_potential(const std::size_t* idx) const;             // ln H on the cell
};

struct RealizableCocycle {
    double a = 2.0;
    std::vector<StageBlock> stages;
    std::vector<double> bases;          // a_1 .. a_{K+1}
    double R = 20.0;                    // certification range
    std::size_t grid_n = 0;
    std::vector<double> stage_errors;   // grid sup |phi - psi_k|
    std::vector<double> stage_bounds;   // 2^{1-k}
    std::vector<double> min_factor;     // grid min of 1 + P_k zeta_k
    std::vector<double> max_psi;        // grid max of psi_k
    double certified_error = 0.0;       // stage_errors.back()
    double tail_bound = 0.0;            // grid max |ln phi - ln psi_K|

    double log_eval_phi(double beta) const;
    double eval_phi(double beta) const;
    double eval_psi_fast(double beta, std::size_t stages_used) const;
    bool all_bounds_hold() const;
};

struct BuildOptions {
    int stages = 4;
    Schedule schedule;
    exprat::JSeq j;
    double R = 20.0;                    // certification range for the final comparison
    std::size_t grid_n = 4001;
    std::vector<double> R_ladder{20, 40, 80, 160, 320, 640};
    Fn zeta_tail;                       // sup_{|beta| >= R} |zeta|; unset means compact support
    exprat::FitOptions fit;
};

// Stages taken verbatim from explicit blocks; carries no fit data.
RealizableCocycle explicit_cocycle(const std::vector<conformal::FiniteConformalBlock>& blocks);

// Target phi = 1 + P_a zeta.
RealizableCocycle build_realizable(const Fn& zeta, double a, const BuildOptions& opts);

nlohmann::json to_json(const StageBlock& s);
StageBlock stage_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RealizableCocycle& c);
RealizableCocycle cocycle_from_json(const nlohmann::json& j);

// Piecewise linear clamp: identity on [-1/2, 1/2], folds back to 0 at +-1.
double clamp_fold(double t);

struct FractionChecks {
    bool b_inequality = false;      // beta <= -delta side
    bool a_inequality = false;      // beta >= delta side
    bool a_delta = false;           // (a^delta + 1)/(a^delta - 1) <= 2
    bool q_bound = false;           // |Q_i| <= 1/2 on the grid where |beta| >= delta
    bool clamp_exercised = false;   // some grid beta in (0, delta) with |Q_1| > 1/2
    double phi1_at_zero = 0.0, phi2_at_zero = 0.0;
    bool all() const { return b_inequality && a_inequality && a_delta && q_bound; }
};

struct FractionPair {
    spectra::ClosedSetSpec K;
    int k = 2;
    int l = 0;
    int lambda0_order = 4;
    double delta = 0.0;
    double a = 0.0, b = 0.0, c = 0.0;

    double P(double beta) const { return mobius_eval(a, beta); }
    double bump(double beta) const;
    double Q(int which, double beta) const;     // which in {1, 2}; beta != 0
    double zeta(int which, double beta) const;  // F(Q) * bump, 0 at beta = 0
    double log_prefactor(int which, double beta) const;
    double phi(int which, double beta) const;
    double phi1(double beta) const { return phi(1, beta); }
    double phi2(double beta) const { return phi(2, beta); }
    // (phi_i - target_i) / (prefactor P Q_i) = zeta_i / Q_i - 1, with target k^-1 resp. k.
    // Scale-free: phi_i approaches its target like Q_i at +-infinity, off K as well.
    double condition_defect(int which, double beta) const;
    // Explicit first-factor block over 2k + l atoms whose integral is the prefactor.
    conformal::FiniteConformalBlock prefactor_block(int which) const;
    FractionChecks check(double R, std::size_t grid_n) const;
};

inline constexpr double kBaseCeiling = 1e300;

FractionPair fraction_pair(const spectra::ClosedSetSpec& K, int k, int lambda0_order);

nlohmann::json to_json(const FractionPair& p);

}  // namespace kms::realizable
