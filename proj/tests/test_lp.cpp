#include "doctest.h"
#include "kmsspec/lp.hpp"

using namespace kms::lp;

TEST_CASE("two-variable tube program") {
    // min x1 + x2 with 1 <= x1 + 2 x2 <= 3 and 0 <= x1 - x2 <= 10: optimum at x1 = x2 = 1/3
    SparseRows A{2, {{{0, 1.0}, {1, 2.0}}, {{0, 1.0}, {1, -1.0}}}};
    const auto r = solve_tube(A, {1, 0}, {3, 10}, {1, 1});
    REQUIRE(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0 / 3).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0 / 3).epsilon(1e-6));
}

TEST_CASE("tube constraints hold on a larger random program") {
    const int n = 30, m = 60;
    SparseRows A{n, {}};
    std::vector<double> lo, hi, cost(n, 1.0);
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < n; ++j)
            if ((i * 7 + j * 3) % 5 == 0) row.emplace_back(j, 1.0 + ((i + j) % 4));
        A.rows.push_back(row);
        lo.push_back(1.0);
        hi.push_back(1.0 + 0.1 * (i % 3));
    }
    const auto r = solve_tube(A, lo, hi, cost);
    REQUIRE(r.converged);
    for (int i = 0; i < m; ++i) {
        double s = 0;
        for (auto [j, v] : A.rows[static_cast<std::size_t>(i)]) s += v * r.x[static_cast<std::size_t>(j)];
        CHECK(s >= lo[static_cast<std::size_t>(i)] - 1e-6);
        CHECK(s <= hi[static_cast<std::size_t>(i)] + 1e-6);
    }
    for (double x : r.x) CHECK(x >= -1e-9);
}
