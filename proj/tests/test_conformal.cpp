#include <cmath>
#include <random>

#include "doctest.h"
#include "kmsspec/conformal.hpp"

using namespace kms::conformal;

namespace {

FiniteConformalBlock block(std::vector<double> mu, std::vector<double> H, double a = 2.0) {
    return {FiniteGroupTable::cyclic(static_cast<int>(mu.size())), ProbVector(std::move(mu)), std::move(H), a};
}

}  // namespace

TEST_CASE("group tables satisfy the axioms") {
    for (int n : {1, 2, 5, 8, 64}) CHECK_NOTHROW(FiniteGroupTable::cyclic(n).validate());
    const auto p = FiniteGroupTable::product(FiniteGroupTable::cyclic(2), FiniteGroupTable::cyclic(4));
    CHECK(p.order == 8);
    CHECK_NOTHROW(p.validate());
    for (int a = 0; a < p.order; ++a) {
        CHECK(p.op(a, p.inv[a]) == p.identity);
        CHECK(p.op(p.inv[a], a) == p.identity);
    }
    CHECK_THROWS(FiniteGroupTable::cyclic(65));
    // not associative: a*b = 0 for all a, b
    CHECK_THROWS(FiniteGroupTable::from_table(2, {0, 0, 0, 0}));
}

TEST_CASE("probability vectors") {
    const ProbVector p({0.25, 0.75});
    CHECK(p[1] == 0.75);
    CHECK_NOTHROW(ProbVector({0.5, 0.5 + 1e-10}));
    CHECK_THROWS(ProbVector({0.5, 0.6}));
    CHECK_THROWS(ProbVector({1.0, 0.0}));
    CHECK_THROWS(ProbVector({1.5, -0.5}));
    const auto q = ProbVector::from_log({std::log(1.0), std::log(3.0)});
    CHECK(q[0] == doctest::Approx(0.25));
    CHECK(ProbVector::uniform(4)[2] == doctest::Approx(0.25));
}

TEST_CASE("conformal weights") {
    const auto b = block({1.0 / 3, 2.0 / 3}, {1, 1});
    auto w = conformal_weights(b, 0);
    CHECK(w[0] == doctest::Approx(0.5));
    w = conformal_weights(b, 1);
    CHECK(w[0] == doctest::Approx(1.0 / 3));
    w = conformal_weights(b, 2);
    CHECK(w[0] == doctest::Approx(0.2));
    CHECK(w[1] == doctest::Approx(0.8));
}

TEST_CASE("integral of the potential") {
    CHECK(integrate_potential(block({0.2, 0.8}, {1, 1}), 3.7) == doctest::Approx(1));
    CHECK(integrate_potential(block({0.2, 0.8}, {2, 0.5}), 0) == doctest::Approx(1));
    CHECK(integrate_potential(block({0.5, 0.5}, {2, 0.5}), 1) == doctest::Approx(1.25));
}

TEST_CASE("product measures are conformal for every generator") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 1);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<FiniteConformalBlock> blocks;
        const int nb = 1 + rep % 3;
        for (int k = 0; k < nb; ++k) {
            std::vector<double> w(2 + (rep + k) % 5);
            double s = 0;
            for (auto& x : w) s += (x = u(rng));
            for (auto& x : w) x /= s;
            blocks.push_back(block(w, std::vector<double>(w.size(), 1.0)));
        }
        TruncatedProductSystem sys{blocks, 0.0};
        std::vector<Generator> gens;
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (int e = 0; e < blocks[b].group.order; ++e) gens.push_back(Generator::in_block(sys, b, e));
        const double beta = u(rng) * 6 - 3;
        const auto mu = joint_measure(product_measure(blocks, beta));
        const auto rep_ = check_conformality(sys, mu, beta, gens, 1e-12);
        CHECK(rep_.pass);
        CHECK(rep_.max_defect <= 1e-12);
    }
}

TEST_CASE("uniform measure is invariant at beta 0; a perturbed one is not conformal") {
    const auto b = block({0.3, 0.7}, {1, 1});
    TruncatedProductSystem sys{{b}, 0.0};
    const std::vector<Generator> gens{Generator::in_block(sys, 0, 1)};
    CHECK(check_conformality(sys, ProbVector::uniform(2), 0, gens, 1e-12).pass);
    const auto mu = conformal_weights(b, 1);
    const ProbVector bad({mu[0] + 0.01, mu[1] - 0.01});
    const auto r = check_conformality(sys, bad, 1, gens, 1e-12);
    CHECK_FALSE(r.pass);
    CHECK(r.max_defect > 1e-3);
}

TEST_CASE("generators outside the truncation are refused") {
    TruncatedProductSystem sys{{block({0.5, 0.5}, {1, 1})}, 0.0};
    CHECK_THROWS_AS(Generator::in_block(sys, 1, 0), kms::Error);
    try {
        Generator::in_block(sys, 3, 1);
    } catch (const kms::Error& e) {
        CHECK(e.kind() == kms::ErrorKind::UnsupportedGenerator);
    }
    Generator g{{0, 1}};
    CHECK_THROWS(check_conformality(sys, ProbVector::uniform(2), 0, {g}, 1e-12));
}

TEST_CASE("cohomologous transform") {
    const ProbVector m({0.5, 0.5});
    const auto same = cohomologous_transform(m, {0, 0}, 2.5);
    CHECK(same[0] == doctest::Approx(0.5));
    const auto zero = cohomologous_transform(m, {1.3, -4}, 0);
    CHECK(zero[0] == doctest::Approx(0.5));
    const auto t = cohomologous_transform(m, {std::log(2.0), 0}, 1);
    CHECK(t[0] == doctest::Approx(2.0 / 3));
    CHECK(t[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("product measure examples") {
    const auto b = block({1.0 / 3, 2.0 / 3}, {1, 1});
    const auto one = product_measure({b}, 1.7);
    CHECK(one[0][0] == doctest::Approx(conformal_weights(b, 1.7)[0]));
    const auto two = product_measure({b, b}, 2);
    for (const auto& f : two) CHECK(f[0] == doctest::Approx(0.2));
    for (const auto& f : product_measure({b, block({0.1, 0.2, 0.7}, {1, 1, 1})}, 0))
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(1.0 / f.size()));
}

TEST_CASE("encode and decode are inverse") {
    TruncatedProductSystem sys{{block({0.5, 0.5}, {1, 1}), block({0.2, 0.3, 0.5}, {1, 1, 1})}, 0.0};
    CHECK(sys.configurations() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(sys.encode(sys.decode(i)) == i);
}

TEST_CASE("potential must lie in [1/a, a]") {
    CHECK_THROWS(block({0.5, 0.5}, {3, 1}, 2).validate());
    CHECK_NOTHROW(block({0.5, 0.5}, {2, 0.5}, 2).validate());
}

TEST_CASE("cylinder functions ignore coordinates outside their window") {
    const CylinderFunction f({1}, {3}, {10, 20, 30});
    std::mt19937_64 rng(1);
    for (int v = 0; v < 3; ++v)
        for (int rep = 0; rep < 20; ++rep) CHECK(f({static_cast<int>(rng() % 5), v, static_cast<int>(rng() % 7)}) == 10 * (v + 1));
}

TEST_CASE("block json round trip") {
    const auto b = block({0.125, 0.375, 0.5}, {2, 1, 0.5});
    const auto c = block_from_json(to_json(b));
    CHECK(c.group.order == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(c.base_measure[i] == b.base_measure[i]);
        CHECK(c.potential[i] == b.potential[i]);
    }
}
