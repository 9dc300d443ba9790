#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "json.hpp"

#include "kmsspec/common.hpp"

namespace kms::conformal {

// Explicit Cayley table. Orders above 64 are refused.
struct FiniteGroupTable {
    int order = 1;
    std::vector<int> mul;  // row-major, mul[a*order+b] = a*b
    std::vector<int> inv;
    int identity = 0;

    int op(int a, int b) const { return mul[static_cast<std::size_t>(a) * order + b]; }

    static FiniteGroupTable cyclic(int n);
    static FiniteGroupTable product(const FiniteGroupTable& a, const FiniteGroupTable& b);
    static FiniteGroupTable from_table(int order, std::vector<int> mul);

    // Exhaustive associativity / identity / inverse check.
    void validate() const;
};

inline constexpr int kMaxGroupOrder = 64;
inline constexpr double kProbTol = 1e-12;
inline constexpr double kRenormTol = 1e-9;

class ProbVector {
public:
    ProbVector() = default;
    // Renormalizes if the sum is off by less than 1e-9, rejects otherwise.
    explicit ProbVector(std::vector<double> w);
    // Build from unnormalized log weights; always normalizes.
    static ProbVector from_log(const std::vector<double>& logw);
    static ProbVector uniform(std::size_t n);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& weights() const { return w_; }

private:
    std::vector<double> w_;
};

struct FiniteConformalBlock {
    FiniteGroupTable group;
    ProbVector base_measure;
    std::vector<double> potential;
    double base_a = 2.0;

    void validate() const;
};

ProbVector conformal_weights(const FiniteConformalBlock& block, double beta);
double integrate_potential(const FiniteConformalBlock& block, double beta);

struct TruncatedProductSystem {
    std::vector<FiniteConformalBlock> blocks;
    double tail_bound = 0.0;

    std::size_t configurations() const;
    std::vector<int> decode(std::size_t index) const;
    std::size_t encode(const std::vector<int>& cfg) const;
    // Omega(g, x) = sum_n log mu_n(g_n x_n) - log mu_n(x_n)
    double omega(const std::vector<int>& g, const std::vector<int>& x) const;
    std::vector<int> act(const std::vector<int>& g, const std::vector<int>& x) const;
};

// Group element of the truncation. Coordinates beyond the listed ones are the identity.
struct Generator {
    std::vector<int> element;

    static Generator in_block(const TruncatedProductSystem& sys, std::size_t block, int elem);
};

struct ConformalityReport {
    double max_defect = 0.0;
    bool pass = false;
};

inline constexpr std::size_t kMaxConfigurations = std::size_t{1} << 20;

ConformalityReport check_conformality(const TruncatedProductSystem& sys, const ProbVector& measure,
                                      double beta, const std::vector<Generator>& gens, double tol);

ProbVector cohomologous_transform(const ProbVector& m, const std::vector<double>& H, double beta);

std::vector<ProbVector> product_measure(const std::vector<FiniteConformalBlock>& blocks, double beta);
// Joint measure on the truncation, configuration order as TruncatedProductSystem::encode.
ProbVector joint_measure(const std::vector<ProbVector>& factors);

// Finite-window stand-in for a continuous function on the product.
class CylinderFunction {
public:
    CylinderFunction(std::vector<std::size_t> window, std::vector<int> radices, std::vector<double> table);
    double operator()(const std::vector<int>& cfg) const;
    const std::vector<std::size_t>& window() const { return window_; }

private:
    std::vector<std::size_t> window_;
    std::vector<int> radices_;
    std::vector<double> table_;
};

nlohmann::json to_json(const FiniteConformalBlock& b);
FiniteConformalBlock block_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProbVector& p);
ProbVector prob_from_json(const nlohmann::json& j);

}  // namespace kms::conformal
