#include <cmath>
#include <random>

#include "doctest.h"
#include "kmsspec/spectra.hpp"

using namespace kms::spectra;
using kms::conformal::FiniteConformalBlock;
using kms::conformal::FiniteGroupTable;
using kms::conformal::ProbVector;

namespace {

std::vector<double> grid_of(const SpectrumReport& r) { return kms::linspace(-r.R, r.R, r.grid_n); }

FiniteConformalBlock blk(std::vector<double> mu, std::vector<double> H) {
    return {FiniteGroupTable::cyclic(static_cast<int>(mu.size())), ProbVector(std::move(mu)), std::move(H), 2.0};
}

}  // namespace

TEST_CASE("solver examples") {
    const auto flat = solve_spectrum([](double) { return 1.0; }, 5, 1e-6, 1001);
    REQUIRE(flat.flat_intervals.size() == 1);
    CHECK(flat.flat_intervals[0].lo == -5);
    CHECK(flat.flat_intervals[0].hi == 5);
    CHECK(flat.flat_intervals[0].clipped_lo);
    CHECK(flat.isolated_roots.empty());

    const auto lin = solve_spectrum([](double b) { return 1 + b; }, 2, 1e-6, 1000);
    REQUIRE(lin.isolated_roots.size() == 1);
    CHECK(std::abs(lin.isolated_roots[0]) <= 1e-6);
    CHECK(lin.flat_intervals.empty());

    const auto none = solve_spectrum([](double b) { return 2 + b * b; }, 3, 1e-6, 500);
    CHECK(none.isolated_roots.empty());
    CHECK(none.flat_intervals.empty());
}

TEST_CASE("reported roots are roots and the trace matches the distance oracle") {
    const ClosedSetSpec K({{1, 2}}, {0, 3});
    const auto phi = target_phi_from_set(K, 2);
    const auto rep = solve_spectrum(phi, 10, 1e-6, 10000);
    for (double r : rep.isolated_roots) CHECK(std::abs(phi(r) - 1) <= 1e-6);
    REQUIRE(rep.flat_intervals.size() == 1);
    CHECK(rep.flat_intervals[0].lo == doctest::Approx(1).epsilon(2e-3));
    CHECK(rep.flat_intervals[0].hi == doctest::Approx(2).epsilon(2e-3));
    CHECK(rep.isolated_roots.size() == 2);
    const auto xs = grid_of(rep);
    const double reach = trace_reach(xs[1] - xs[0]);
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (K.distance(xs[i]) == 0 || std::abs(xs[i]) <= reach || std::abs(xs[i] - 3) <= reach) want.push_back(i);
    CHECK(rep.grid_trace() == want);
}

TEST_CASE("intervals are maximal at grid resolution") {
    const auto rep = solve_spectrum([](double b) { return 1 + std::max(0.0, std::abs(b) - 1); }, 4, 1e-6, 801);
    REQUIRE(rep.flat_intervals.size() == 1);
    const auto xs = grid_of(rep);
    const double h = xs[1] - xs[0];
    CHECK(rep.flat_intervals[0].lo <= -1 + 1e-12);
    CHECK(rep.flat_intervals[0].lo > -1 - h);
    CHECK(rep.flat_intervals[0].hi >= 1 - 1e-12);
    CHECK(rep.flat_intervals[0].hi < 1 + h);
}

TEST_CASE("close features raise a resolution warning") {
    const auto rep = solve_spectrum([](double b) { return 1 + (b - 0.001) * (b + 0.001); }, 1, 1e-9, 11);
    CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("targets") {
    const auto one = target_phi_from_set(ClosedSetSpec::whole_line(), 2);
    for (double b = -10; b <= 10; b += 0.1) CHECK(one(b) == 1);
    const auto zero = target_phi_from_set(ClosedSetSpec({}, {0}), 3);
    CHECK(zero(0) == 1);
    for (double b = -10; b <= 10; b += 0.01)
        if (std::abs(b) > 1e-9) CHECK(zero(b) != 1);
    CHECK_THROWS_AS(target_zeta_from_set(ClosedSetSpec({{1, 2}}, {})), kms::Error);
    const auto chk = check_target(ClosedSetSpec({{1, 2}}, {0}), 2, 10, 4001);
    CHECK(chk.zero_set_matches);
    CHECK(chk.max_correction <= 0.5);
    const auto zt = target_zeta_from_set(ClosedSetSpec({}, {0}));
    for (double R : {1.0, 2.0, 10.0})
        for (double b = R; b <= R + 100; b += 0.25) CHECK(zt(b) <= target_zeta_tail(R) + 1e-15);
}

TEST_CASE("wreath system measures") {
    const auto sys = assemble_wreath(kms::realizable::explicit_cocycle({blk({0.3, 0.7}, {2, 0.5}), blk({0.1, 0.2, 0.7}, {1, 1.5, 1})}));
    CHECK(sys.cell_count() == 6);
    for (double beta : {-2.0, 0.0, 1.5}) {
        const auto fm = factor_measures(sys, beta);
        double s = 0;
        for (std::size_t i = 0; i < fm.cells.size(); ++i) s += fm.nu[i] * std::exp(beta * fm.log_H[i] - sys.log_phi(beta));
        CHECK(s == doctest::Approx(1).epsilon(1e-13));
        for (std::size_t i = 0; i < fm.cells.size(); ++i)
            CHECK(std::log(fm.eta[i]) == doctest::Approx(sys.log_eta(beta, fm.cells[i])).epsilon(1e-12));
        if (beta == 0)
            for (std::size_t i = 0; i < fm.cells.size(); ++i) CHECK(fm.eta[i] == doctest::Approx(1.0 / 6));
    }
    // shift cocycle is -log H(x_0) for the generator
    WreathWindow w{0, {{1, 2}}};
    CHECK(sys.omega_shift(1, w) == doctest::Approx(-sys.log_H({1, 2})));
    CHECK_THROWS_AS(sys.omega_shift(2, w), kms::Error);
    CHECK(shift_rn_derivative(sys, 0, {0, 1}) == doctest::Approx(1));
}

TEST_CASE("trivial potential: eta equals nu and the shift RN is phi") {
    const auto sys = assemble_wreath(kms::realizable::explicit_cocycle({blk({0.3, 0.7}, {1, 1})}));
    for (double beta : {-1.0, 2.0}) {
        for (std::size_t c : {0u, 1u}) {
            CHECK(sys.log_eta(beta, {c}) == doctest::Approx(sys.log_nu(beta, {c})));
            CHECK(shift_rn_derivative(sys, beta, {c}) == doctest::Approx(std::exp(sys.log_phi(beta))));
        }
    }
}

TEST_CASE("Lambda_0 regions") {
    const auto pair = kms::realizable::fraction_pair(ClosedSetSpec({{1, 2}}, {}), 2, 4);
    for (int q : {2, 3, 4}) {
        FreeProductOptions o;
        o.lambda0 = q;
        const auto sys = assemble_free_product(pair, 2, o);
        double m[3] = {0, 0, 0};
        for (int x0 = 0; x0 < q; ++x0)
            for (int x1 = 0; x1 < q; ++x1) {
                FPCylinder c;
                c.x = {{0, x0}, {1, x1}};
                m[static_cast<int>(sys.region(c))] += std::exp(sys.log_measure(0, c));
            }
        CHECK(m[0] == doctest::Approx(1.0 / (q * q)));
        CHECK(m[1] == doctest::Approx((q - 1.0) / q));
        CHECK(m[2] == doctest::Approx((q - 1.0) / (q * q)));
    }
    CHECK_THROWS_AS(assemble_free_product(pair, 1), kms::Error);
}

TEST_CASE("theta and its inverse") {
    const auto pair = kms::realizable::fraction_pair(ClosedSetSpec({}, {-1, 2}), 2, 4);
    FreeProductOptions o;
    o.lambda0 = 3;
    const auto sys = assemble_free_product(pair, 3, o);
    std::mt19937_64 rng(8);
    const auto n1 = sys.model1.stages[0].cell_extent(0), n2 = sys.model2.stages[0].cell_extent(0);
    for (int rep = 0; rep < 500; ++rep) {
        FPCylinder c;
        for (int k = -1; k <= 1; ++k) c.x[k] = static_cast<int>(rng() % 3);
        for (int k = -1; k <= 0; ++k) {
            c.y[k] = {rng() % n1};
            c.z[k] = {rng() % n2};
        }
        CHECK(sys.theta(sys.theta_inverse(c)) == c);
        CHECK(sys.theta_inverse(sys.theta(c)) == c);
        if (sys.region(c) == Region::Y0) {
            CHECK(sys.theta(c) == c);
            CHECK(sys.omega_a(c) == 0);
            CHECK(theta_rn_derivative(sys, 1.3, c) == 1);
        }
        if (sys.region(c) == Region::Y1) CHECK(sys.region(sys.theta(c)) == Region::Y2);
        if (sys.region(c) == Region::Y2) CHECK(sys.region(sys.theta(c)) == Region::Y1);
    }
}

TEST_CASE("free-product spectra") {
    const auto p = kms::realizable::fraction_pair(ClosedSetSpec({}, {-1, 2}), 2, 4);
    const auto rep = solve_free_product_spectrum(p, 10, 1e-6, 10000);
    REQUIRE(rep.isolated_roots.size() == 2);
    CHECK(rep.isolated_roots[0] == doctest::Approx(-1).epsilon(1e-6));
    CHECK(rep.isolated_roots[1] == doctest::Approx(2).epsilon(1e-6));
    CHECK(rep.flat_intervals.empty());
    for (double r : rep.isolated_roots) CHECK(std::abs(r) > 0.5);
}

TEST_CASE("dummy extension") {
    const auto p = kms::realizable::fraction_pair(ClosedSetSpec({{1, 2}}, {}), 2, 4);
    const auto sys = assemble_free_product(p, 2);
    const auto spec = solve_free_product_spectrum(p, 10, 1e-6, 2000);
    const auto r1 = dummy_extension_check(3, 1, sys, spec, {-2, 0, 1});
    CHECK(r1.group_order == 24);
    CHECK(r1.orbit_size == 24);
    CHECK(r1.transitive);
    CHECK(r1.max_lift_defect <= 1e-10);
    CHECK(r1.pass);
    const auto r2 = dummy_extension_check(3, 2, sys, spec, {1});
    CHECK(r2.orbit_size == 648);
}
