#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "kmsspec/common.hpp"

namespace kms::exprat {

using BigInt = boost::multiprecision::cpp_int;

// c * a^beta stored as (ln c, ln a).
struct Term {
    double log_coef = 0.0;
    double log_base = 0.0;
};

double log_sum_terms(const std::vector<Term>& terms, double beta);

// Ratio of positive exponential sums with dominating denominator bases.
class ExpSumRatio {
public:
    ExpSumRatio() = default;
    ExpSumRatio(std::vector<Term> numer, std::vector<Term> denom);
    // (coefficient, base) pairs as plain reals.
    static ExpSumRatio from_values(const std::vector<std::pair<double, double>>& numer,
                                   const std::vector<std::pair<double, double>>& denom);

    double eval(double beta) const;
    double log_eval(double beta) const;
    // Limits at +-infinity; always 0 given base dominance.
    static double tail_limit(int /*sign*/) { return 0.0; }
    // Same function of -beta: every base replaced by its reciprocal.
    ExpSumRatio reflected() const;

    const std::vector<Term>& numer() const { return numer_; }
    const std::vector<Term>& denom() const { return denom_; }
    bool empty() const { return numer_.empty(); }

private:
    std::vector<Term> numer_, denom_;
};

nlohmann::json to_json(const ExpSumRatio& r);
ExpSumRatio ratio_from_json(const nlohmann::json& j);

// phi_n(x) = D_n^{-1} (2^x + 2^{-x})^{-n}
struct ApproxUnit {
    int n = 1;
    double log_D = 0.0;
    double quad_error = 0.0;  // GSL error estimate, relative
    double D() const;
    double operator()(double x) const;
};

ApproxUnit approximate_unit(int n);

// ln (2^x + 2^-x)^{-n} relative to its peak, i.e. -n ln cosh(x ln 2).
double log_cosh_kernel(int n, double x);

// w * cosh((beta - center) ln 2)^{-n}; a positive multiple of phi_n(beta - center).
struct Kernel {
    int n = 4;
    double center = 0.0;
    double weight = 0.0;
};

struct KernelSum {
    std::vector<Kernel> terms;

    double eval(double beta) const;
    // Upper bound for |d/dbeta| on [beta - half, beta + half].
    double derivative_bound(double beta, double half) const;
    // ln of the common denominator prod_j (4^beta + 4^{y_j})^{n_j} used by expand().
    double log_common_denominator(double beta) const;
    int max_n() const;
    long total_degree() const;
    // Exact rewrite as one ratio over the common denominator.
    ExpSumRatio expand() const;
};

nlohmann::json to_json(const KernelSum& k);
KernelSum kernels_from_json(const nlohmann::json& j);

struct FitTarget {
    Fn f;
    // sup |f| beyond +-R; f is assumed nonnegative.
    double tail_bound = 0.0;
};

struct FitOptions {
    double eps = 1e-2;
    double R = 20.0;
    std::vector<int> levels{1, 4, 16, 64, 256};
    int budget = 6;         // refinement rounds
    double margin = 0.85;   // LP tube as a fraction of eps
    std::size_t grid_n = 0; // 0: chosen from the finest level used
};

struct FitResult {
    KernelSum kernels;
    ExpSumRatio r;
    double grid_error = 0.0;        // max error on the certification grid
    double lipschitz_slack = 0.0;
    double certified_error = 0.0;   // max of (grid + slack) and the tail term
    double tail_error_bound = 0.0;
    bool tail_certified = false;
    std::size_t dictionary_size = 0;
    std::size_t certification_points = 0;
    int rounds = 0;
};

// Fits a nonnegative target by a positive kernel combination (an element of the ratio family).
FitResult fit_c0(const FitTarget& target, const FitOptions& opts, bool expand = true);

// j_1, j_2, ...: explicit head then a constant tail.
struct JSeq {
    std::vector<int> head;
    int tail = 2;
    int at(std::size_t k) const;  // 1-based
    // log and exact value of j_{from} * ... * j_{to}
    double log_product(std::size_t from, std::size_t to) const;
    BigInt product(std::size_t from, std::size_t to) const;
};

// Exact positive integer m * 2^e.
struct Mult {
    std::uint64_t m = 0;
    std::int64_t e = 0;
    double log() const;
    BigInt value() const;
    std::string str() const;
    static Mult from_log(double lg);  // >= 2^40 precision
};

// A multiset of atoms with one base per class; multiplicity = factors[factor] * mult.
struct ClassSide {
    enum Group : int { Num = 0, NumCopy = 1, Rest = 2 };
    struct Class {
        double log_base = 0.0;
        int factor = 0;
        Mult mult;
        int group = Rest;
    };
    std::vector<BigInt> factors;
    std::vector<Class> classes;
    BigInt size;           // exact number of atoms
    std::size_t first_j = 1, last_j = 0;  // which j_k make up this side

    double log_factor(int f) const;
    double class_log_mult(std::size_t i) const;
    // ln sum over atoms in the given group of base^beta
    double log_group_sum(int group, double beta) const;
    std::array<double, 3> log_group_sums(double beta) const;  // one pass over the classes
    double log_total(double beta) const;
    BigInt exact_count() const;
};

// Fast evaluator of eta = g / (1 + 2g + (T/K) / (S D(beta) (1 + t^beta))).
struct EtaEval {
    KernelSum g;
    double log_TK = kNegInf;  // ln(T/K)
    double log_S = 0.0;
    double log_t = 0.0;
    double eval(double beta) const;
    double eval_unperturbed(double beta) const;  // g/(1+2g)
};

// F = S1 x S2 with mu(x,y) proportional to base_x * base_y.
// F0 = Num1 x S2, F1 = NumCopy1 x (Num2 u NumCopy2) u Rest1 x Num2, F2 = the rest.
struct PartitionedBlockSystem {
    ClassSide s1, s2;
    double t = 2.0;
    EtaEval eta1, eta2;
    double R = 0.0;

    double log_size() const;  // ln |F|
    std::size_t j_count() const { return s2.last_j >= s1.first_j ? s2.last_j - s1.first_j + 1 : 0; }
    struct Sums {
        std::array<double, 3> part;  // ln sum_{F_part} mu^beta, unnormalized
        double total = 0.0;
    };
    Sums sums(double beta) const;
    double log_part_sum(int part, double beta) const;
    double log_total(double beta) const;
    // int H^beta d mu_beta with H = t, 1/t, 1 on F0, F1, F2.
    double log_integral(double beta) const;
    double zeta(double beta) const { return eta1.eval(beta) - eta2.eval(beta); }
};

struct IdentityResidual {
    double max_eta1 = 0.0;
    double max_eta2 = 0.0;
    double max_integral = 0.0;  // |int H^beta - (1 + P(eta1 - eta2))|
    std::size_t points = 0;
    bool counts_exact = false;  // class multiplicities add up to prod j_k
};

IdentityResidual check_identities(const PartitionedBlockSystem& sys, double R, std::size_t points);

struct RealizeOptions {
    double R = 20.0;
    double f_tail = 0.0;  // sup |f| beyond +-R
    std::size_t first_j = 1;
    FitOptions fit;
};

struct RealizeResult {
    PartitionedBlockSystem system;
    double approx_error = 0.0;  // grid sup |f - (eta1 - eta2)|
    double fit_error_plus = 0.0, fit_error_minus = 0.0;
    double rebalance_plus = 0.0, rebalance_minus = 0.0;  // sup (T/K)/(den (1+t^beta))
    std::size_t p = 0, n = 0;  // S1 uses j_first..j_p, S2 uses j_{p+1}..j_n
};

RealizeResult realize_block(const Fn& f, double t, double eps, const JSeq& j, const RealizeOptions& opts);

nlohmann::json to_json(const PartitionedBlockSystem& s);
PartitionedBlockSystem block_system_from_json(const nlohmann::json& j);

}  // namespace kms::exprat
