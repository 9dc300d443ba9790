#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kmsspec/exprational.hpp"

using namespace kms::exprat;

TEST_CASE("ratio evaluation examples") {
    const auto r = ExpSumRatio::from_values({{1, 2}}, {{1, 1}, {1, 4}});
    CHECK(r.eval(0) == doctest::Approx(0.5));
    CHECK(r.eval(1) == doctest::Approx(0.4));
    CHECK(ExpSumRatio::tail_limit(1) == 0);
    CHECK(r.eval(200) < 1e-50);
    CHECK(r.eval(-200) < 1e-50);
}

TEST_CASE("base dominance is enforced") {
    CHECK_THROWS(ExpSumRatio::from_values({{1, 8}}, {{1, 1}, {1, 4}}));
    CHECK_THROWS(ExpSumRatio::from_values({{1, 0.5}}, {{1, 1}, {1, 4}}));
    CHECK_THROWS(ExpSumRatio::from_values({{-1, 2}}, {{1, 1}, {1, 4}}));
}

TEST_CASE("reflection is evaluation at -beta") {
    const auto r = ExpSumRatio::from_values({{0.3, 2}, {2, 1.5}}, {{1, 0.5}, {0.7, 1}, {1, 5}});
    const auto s = r.reflected();
    for (double b = -5; b <= 5; b += 0.37) CHECK(s.eval(b) == doctest::Approx(r.eval(-b)).epsilon(1e-13));
    const auto back = ratio_from_json(to_json(r));
    CHECK(back.eval(1.3) == r.eval(1.3));
}

TEST_CASE("approximate units") {
    const auto u = approximate_unit(1);
    CHECK(u.D() == doctest::Approx(std::numbers::pi / (2 * std::numbers::ln2)).epsilon(1e-12));
    CHECK(u(0) == doctest::Approx(1 / (2 * u.D())).epsilon(1e-12));
    for (int n = 1; n <= 5; ++n) {
        const auto un = approximate_unit(n);
        CHECK(un(0.7) == doctest::Approx(un(-0.7)));
        CHECK(un(0) > un(0.5));
    }
}

TEST_CASE("kernel sums expand to the same function") {
    KernelSum ks{{{4, -1.5, 0.2}, {16, 0.25, 0.05}, {1, 3.0, 0.1}}};
    const auto r = ks.expand();
    for (double b = -6; b <= 6; b += 0.173) CHECK(r.eval(b) == doctest::Approx(ks.eval(b)).epsilon(1e-10));
    CHECK(ks.max_n() == 16);
    // derivative bound dominates finite differences
    for (double b = -4; b <= 4; b += 0.5) {
        const double h = 1e-5;
        CHECK(std::abs(ks.eval(b + h) - ks.eval(b - h)) / (2 * h) <= ks.derivative_bound(b, 0.1) + 1e-9);
    }
    const auto again = kernels_from_json(to_json(ks));
    CHECK(again.eval(0.3) == ks.eval(0.3));
}

TEST_CASE("exact multiplicities") {
    const Mult m{3, 5};
    CHECK(m.value() == 96);
    CHECK(m.log() == doctest::Approx(std::log(96.0)));
    std::mt19937_64 rng(4);
    // integers: exact below 2^40, 40 significant bits above
    std::uniform_real_distribution<double> u(28, 300);
    for (int i = 0; i < 100; ++i) {
        const double lg = u(rng);
        CHECK(std::abs(Mult::from_log(lg).log() - lg) <= std::ldexp(1.0, -39));
    }
    CHECK(Mult::from_log(std::log(7.4)).value() == 7);
    CHECK(Mult::from_log(std::log(1e6)).value() == 1000000);
    const JSeq j{{2, 3}, 2};
    CHECK(j.at(1) == 2);
    CHECK(j.at(2) == 3);
    CHECK(j.at(7) == 2);
    CHECK(j.product(1, 4) == 24);
    CHECK(j.log_product(1, 4) == doctest::Approx(std::log(24.0)));
}

TEST_CASE("fits of targets already in the family") {
    KernelSum ks{{{4, 0.5, 0.3}, {4, -2.0, 0.2}}};
    FitTarget tgt{[ks](double b) { return ks.eval(b); }, 1e-12};
    FitOptions o;
    o.eps = 1e-3;
    o.R = 20;
    const auto r = fit_c0(tgt, o);
    CHECK(r.certified_error <= 1e-3);
    for (double b = -20; b <= 20; b += 0.71) CHECK(std::abs(r.r.eval(b) - ks.eval(b)) <= 1e-3);
}

TEST_CASE("zero and smooth targets") {
    FitOptions o;
    o.eps = 1e-2;
    o.R = 20;
    const auto z = fit_c0({[](double) { return 0.0; }, 0.0}, o);
    for (double b = -30; b <= 30; b += 0.5) CHECK(std::abs(z.r.eval(b)) <= 1e-2);
    // 1/(4(1 + 2^beta)) tends to 1/4 at -inf while every ratio tends to 0, so no uniform fit exists
    try {
        fit_c0({[](double b) { return 0.25 / (1 + std::exp2(b)); }, 0.25}, o);
        FAIL("fit accepted a target that does not vanish at -inf");
    } catch (const kms::Error& e) {
        CHECK(e.kind() == kms::ErrorKind::FitFailure);
    }
    const auto f = [](double b) { return 0.25 / ((1 + std::exp2(b)) * (1 + std::exp2(-b / 2))) * 2; };
    const auto s = fit_c0({f, f(-20)}, o);
    CHECK(s.certified_error <= 1e-2);
    for (double b = -20; b <= 20; b += 0.29) CHECK(std::abs(s.r.eval(b) - f(b)) <= 1e-2);
}

TEST_CASE("realizing the zero function") {
    RealizeOptions o;
    o.R = 20;
    const JSeq j{{}, 2};
    const auto res = realize_block([](double) { return 0.0; }, 2.0, 0.05, j, o);
    const auto& sys = res.system;
    for (double b = -20; b <= 20; b += 0.1) CHECK(std::abs(sys.eta1.eval(b) - sys.eta2.eval(b)) <= 0.05);
    const auto id = check_identities(sys, 20, 2001);
    CHECK(id.counts_exact);
    CHECK(id.max_eta1 <= 1e-10);
    CHECK(id.max_eta2 <= 1e-10);
    CHECK(sys.s1.exact_count() * sys.s2.exact_count() == j.product(sys.s1.first_j, sys.s2.last_j));
    // the partition covers F: part sums add to the total
    for (double b : {-3.0, 0.0, 2.5}) {
        const auto s = sys.sums(b);
        const double m = std::max({s.part[0], s.part[1], s.part[2]});
        const double tot = m + std::log(std::exp(s.part[0] - m) + std::exp(s.part[1] - m) + std::exp(s.part[2] - m));
        CHECK(tot == doctest::Approx(s.total).epsilon(1e-12));
    }
    const auto back = block_system_from_json(to_json(sys));
    CHECK(back.log_integral(0.7) == doctest::Approx(sys.log_integral(0.7)).epsilon(1e-12));
}
