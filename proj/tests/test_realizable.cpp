#include <cmath>
#include <random>

#include "doctest.h"
#include "kmsspec/realizable.hpp"

using namespace kms::realizable;
using kms::spectra::ClosedSetSpec;

TEST_CASE("mobius function") {
    CHECK(mobius_eval(4, 0) == 0);
    CHECK(mobius_eval(4, 1) == doctest::Approx(0.6));
    CHECK(mobius_eval(4, -1) == doctest::Approx(-0.6));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 1000; ++i) {
        const double b = u(rng), a = 1.01 + std::abs(u(rng));
        CHECK(std::abs(mobius_eval(a, b) + mobius_eval(a, -b)) <= 1e-15);
        CHECK(std::abs(mobius_eval(a, b)) <= 1);
    }
}

TEST_CASE("ratio bounds dominate sampled ratios") {
    CHECK(ratio_bound(3, 3) == doctest::Approx(1));
    const auto d = ratio_bound_detail(2, 1.5);
    CHECK(d.limit_zero == doctest::Approx(std::log(2) / std::log(1.5)).epsilon(1e-6));
    CHECK(d.C >= std::log(2) / std::log(1.5));
    for (auto [an, anext] : std::vector<std::pair<double, double>>{{2, 1.5}, {1.5, 1.2}, {1.1, 1.05}, {4, 1.01}}) {
        const double C = ratio_bound(an, anext);
        for (double b = -40; b <= 40; b += 0.01)
            if (b != 0) CHECK(std::abs(mobius_eval(an, b) / mobius_eval(anext, b)) <= C * (1 + 1e-12));
    }
}

TEST_CASE("schedules decrease to 1 with summable excess") {
    for (const Schedule s : {Schedule{Schedule::InverseSquare, 0.5}, Schedule{Schedule::Geometric, 0.5}}) {
        CHECK(s.at(2, 1) == 2);
        double sum = 0;
        for (int n = 1; n < 40; ++n) {
            CHECK(s.at(2, n + 1) < s.at(2, n));
            CHECK(s.at(2, n) > 1);
        }
        for (int n = 1; n < 100000; ++n) sum += s.at(2, n) - 1;
        CHECK(sum < 10);
    }
}

TEST_CASE("clamp fold") {
    CHECK(clamp_fold(0.3) == 0.3);
    CHECK(clamp_fold(-0.5) == -0.5);
    CHECK(clamp_fold(1) == doctest::Approx(0));
    CHECK(clamp_fold(-1) == doctest::Approx(0));
    for (double t = -3; t <= 3; t += 0.01) CHECK(std::abs(clamp_fold(t)) <= 0.5 + 1e-15);
}

TEST_CASE("explicit cocycles multiply block integrals") {
    kms::conformal::FiniteConformalBlock b1{kms::conformal::FiniteGroupTable::cyclic(2), kms::conformal::ProbVector({0.5, 0.5}), {2, 0.5}, 2};
    kms::conformal::FiniteConformalBlock b2{kms::conformal::FiniteGroupTable::cyclic(3), kms::conformal::ProbVector({0.2, 0.3, 0.5}), {1, 1.5, 1}, 2};
    const auto c = explicit_cocycle({b1, b2});
    for (double b : {-2.0, -0.5, 0.0, 1.0, 3.0})
        CHECK(c.eval_phi(b) == doctest::Approx(kms::conformal::integrate_potential(b1, b) * kms::conformal::integrate_potential(b2, b)));
    CHECK(c.eval_phi(0) == doctest::Approx(1).epsilon(1e-12));
    const auto one = explicit_cocycle({{kms::conformal::FiniteGroupTable::cyclic(2), kms::conformal::ProbVector({0.3, 0.7}), {1, 1}, 2}});
    CHECK(one.eval_phi(4.2) == doctest::Approx(1));
    const auto back = cocycle_from_json(to_json(c));
    CHECK(back.eval_phi(1.3) == doctest::Approx(c.eval_phi(1.3)).epsilon(1e-14));
}

TEST_CASE("vanishing target gives the trivial potential") {
    BuildOptions o;
    o.stages = 2;
    o.grid_n = 801;
    const auto c = build_realizable([](double) { return 0.0; }, 2.0, o);
    for (double b = -20; b <= 20; b += 0.5) CHECK(c.eval_phi(b) == doctest::Approx(1).epsilon(1e-12));
    for (const auto& st : c.stages)
        if (!st.factorized)
            for (double h : st.block.potential) CHECK(h == 1);
}

TEST_CASE("a small realization: three-valued potential, stage bounds, phi(0) = 1") {
    BuildOptions o;
    o.stages = 2;
    o.grid_n = 1201;
    const auto zeta = [](double b) { return 0.2 * std::sin(b) * std::exp(-b * b / 8); };
    o.zeta_tail = [](double R) { return 0.2 * std::exp(-R * R / 8); };
    const auto c = build_realizable(zeta, 2.0, o);
    CHECK(c.all_bounds_hold());
    CHECK(c.eval_phi(0) == doctest::Approx(1).epsilon(1e-12));
    CHECK(c.certified_error <= 0.5);
    for (double b = -20; b <= 20; b += 0.25) {
        const double phi = 1 + mobius_eval(2, b) * zeta(b);
        CHECK(std::abs(c.eval_phi(b) - phi) <= 0.5 + 1e-12);
    }
    for (const auto& st : c.stages) {
        if (!st.factorized) continue;
        const std::size_t n1 = st.cell_extent(0), n2 = st.cell_extent(1);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                const std::size_t idx[2] = {i, j};
                const double h = std::exp(st.log_cell_potential(idx));
                const double t = st.system.t;
                CHECK((std::abs(h - t) < 1e-12 || std::abs(h - 1 / t) < 1e-12 || std::abs(h - 1) < 1e-12));
            }
    }
}

TEST_CASE("fraction pair: cancellation at zero and the grid invariants") {
    for (const auto& K : {ClosedSetSpec({{1, 2}}, {}), ClosedSetSpec({}, {-1, 2}), ClosedSetSpec({{3, ClosedSetSpec::kInf}}, {})})
        for (int k : {2, 3}) {
            const auto p = fraction_pair(K, k, 2 * k + 1);
            CHECK(p.l == 1);
            CHECK(p.phi1(0) == doctest::Approx(1).epsilon(1e-12));
            CHECK(p.phi2(0) == doctest::Approx(1).epsilon(1e-12));
            CHECK(p.a > p.c);
            CHECK(p.c == doctest::Approx(p.b + 1));
            CHECK(p.b > 1);
            const auto chk = p.check(10, 4001);
            CHECK(chk.all());
            for (double b = -10; b <= 10; b += 0.01)
                if (std::abs(b) >= p.delta) CHECK(std::abs(p.Q(1, b)) <= 0.5 + 1e-12);
            // prefactor blocks integrate to the prefactor
            for (int which : {1, 2}) {
                const auto blk = p.prefactor_block(which);
                for (double b : {-2.0, -0.3, 0.4, 1.7})
                    CHECK(std::log(kms::conformal::integrate_potential(blk, b)) ==
                          doctest::Approx(p.log_prefactor(which, b)).epsilon(1e-12));
            }
        }
}

TEST_CASE("fraction pair hits its targets exactly on K") {
    const ClosedSetSpec K({{1, 2}}, {});
    const auto p = fraction_pair(K, 2, 4);
    for (double b = 1; b <= 2; b += 0.01) {
        CHECK(p.phi1(b) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p.phi2(b) == doctest::Approx(2).epsilon(1e-12));
        CHECK(std::abs(p.condition_defect(1, b)) <= 1e-12);
    }
    for (double b : {-5.0, -0.5, 0.5, 2.5, 9.0}) CHECK(std::abs(p.condition_defect(1, b)) > 1e-6);
    CHECK_THROWS(fraction_pair(K, 1, 4));
    CHECK_THROWS(fraction_pair(K, 2, 3));
    CHECK_THROWS(fraction_pair(ClosedSetSpec({{-1, 1}}, {}), 2, 4));
}
