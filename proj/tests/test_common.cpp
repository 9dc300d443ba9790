#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "kmsspec/common.hpp"

using namespace kms;

TEST_CASE("log-sum-exp agrees with the naive sum where that is safe") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> xs(1 + rep % 7);
        double naive = 0;
        LogSum ls;
        for (auto& x : xs) {
            x = u(rng);
            naive += std::exp(x);
            ls.add(x);
        }
        CHECK(log_sum_exp(xs) == doctest::Approx(std::log(naive)).epsilon(1e-13));
        CHECK(ls.value() == doctest::Approx(std::log(naive)).epsilon(1e-13));
    }
}

TEST_CASE("log-sum-exp survives huge exponents") {
    CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000 + std::log(2.0)));
    LogSum empty;
    CHECK(empty.empty());
    CHECK(empty.value() == kNegInf);
    CHECK(log1p_exp(800) == doctest::Approx(800));
    CHECK(log1p_exp(-800) == doctest::Approx(0).epsilon(1e-300));
    CHECK(log1p_exp(0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("decimal rendering round-trips") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(parse_dec(dec(x)) == x);
    }
    CHECK(dec(0.1) == "0.1");
    CHECK(dec(2) == "2");
    CHECK_THROWS_AS(parse_dec("abc"), Error);
    CHECK_THROWS_AS(parse_dec("1.5x"), Error);
}

TEST_CASE("linspace hits both ends") {
    const auto xs = linspace(-10, 10, 10000);
    CHECK(xs.size() == 10000);
    CHECK(xs.front() == -10);
    CHECK(xs.back() == 10);
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] > xs[i - 1]);
}

TEST_CASE("parallel grid evaluation matches the serial loop for any worker count") {
    const auto xs = linspace(-3, 3, 1001);
    const Fn f = [](double b) { return std::sin(b) * std::exp(b); };
    for (const char* n : {"1", "2", "5"}) {
        setenv("KMS_THREADS", n, 1);
        CHECK(thread_count() == static_cast<unsigned>(std::atoi(n)));
        const auto ys = eval_grid(f, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ys[i] == f(xs[i]));
    }
    unsetenv("KMS_THREADS");
    CHECK(thread_count() >= 1);
}

TEST_CASE("errors carry their kind") {
    try {
        require(false, ErrorKind::Window, "outside");
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Window);
        CHECK(std::string(to_string(e.kind())).size() > 0);
    }
}
