#include <random>

#include "doctest.h"
#include "kmsspec/closedset.hpp"

using kms::spectra::ClosedSetSpec;

TEST_CASE("distance is zero exactly on the set") {
    const ClosedSetSpec K({{1, 2}, {5, ClosedSetSpec::kInf}}, {0, -3});
    for (double b : {1.0, 1.5, 2.0, 5.0, 1e9, 0.0, -3.0}) CHECK(K.contains(b));
    CHECK(K.distance(3) == doctest::Approx(1));
    CHECK(K.distance(-1.5) == doctest::Approx(1.5));
    CHECK(K.distance(-10) == doctest::Approx(7));
    CHECK(K.distance(0.25) == doctest::Approx(0.25));
}

TEST_CASE("distance is 1-Lipschitz") {
    const ClosedSetSpec K({{-1, -0.5}, {2, 3}}, {0.7, 8});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng), y = u(rng);
        CHECK(std::abs(K.distance(x) - K.distance(y)) <= std::abs(x - y) + 1e-12);
    }
}

TEST_CASE("whole line") {
    const auto R = ClosedSetSpec::whole_line();
    CHECK(R.distance(-1e300) == 0);
    CHECK(R.distance(42) == 0);
}

TEST_CASE("json round trip with infinite endpoints") {
    const auto j = nlohmann::json::parse(R"({"intervals": [["3", "inf"], ["-inf", "-7"]], "points": ["0.5"]})");
    const auto K = kms::spectra::closed_set_from_json(j);
    CHECK(K.contains(1e12));
    CHECK(K.contains(-100));
    CHECK(K.contains(0.5));
    CHECK_FALSE(K.contains(0));
    const auto K2 = kms::spectra::closed_set_from_json(kms::spectra::to_json(K));
    for (double b : {-8.0, -7.0, 0.0, 0.5, 2.0, 3.0}) CHECK(K2.distance(b) == K.distance(b));
}

TEST_CASE("malformed sets are rejected") {
    CHECK_THROWS(kms::spectra::closed_set_from_json(nlohmann::json::parse(R"({"intervals": [["2", "1"]]})")));
    CHECK_THROWS(kms::spectra::closed_set_from_json(nlohmann::json::parse(R"({"points": [1.5]})")));
}
