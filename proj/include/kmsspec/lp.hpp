#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace kms::lp {

// Row-sparse matrix: rows[i] lists (column, value).
struct SparseRows {
    std::size_t cols = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
};

struct TubeResult {
    std::vector<double> x;
    bool converged = false;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
};

// min c.x  subject to  lo <= A x <= hi,  x >= 0.
// Mehrotra predictor-corrector on the inequality form G x + s = h.
TubeResult solve_tube(const SparseRows& A, const std::vector<double>& lo, const std::vector<double>& hi,
                      const std::vector<double>& cost, int max_iter = 80, double tol = 1e-9);

}  // namespace kms::lp
