#include <cmath>
#include <random>

#include "doctest.h"
#include "kmsspec/growth.hpp"

using namespace kms::growth;

TEST_CASE("sphere sizes") {
    const auto z = WordMetricGroup::lattice(1);
    const auto c1 = ball_census(z, 20);
    CHECK(c1.sphere_sizes[0] == 1);
    for (int k = 1; k <= 20; ++k) CHECK(c1.sphere_sizes[static_cast<std::size_t>(k)] == 2);
    const auto c2 = ball_census(WordMetricGroup::lattice(2), 30);
    for (int k = 1; k <= 30; ++k) CHECK(c2.sphere_sizes[static_cast<std::size_t>(k)] == static_cast<std::uint64_t>(4 * k));
    const auto f = ball_census(WordMetricGroup::free_group(2), 6);
    for (int k = 1; k <= 6; ++k) CHECK(f.sphere_sizes[static_cast<std::size_t>(k)] == 4 * static_cast<std::uint64_t>(std::pow(3, k - 1)));
}

TEST_CASE("direct and breadth-first spheres agree on a non-standard lattice") {
    const auto g = WordMetricGroup::lattice(2, {{1, 0}, {1, 1}});
    const auto sph = g.spheres(8);
    for (int k = 0; k <= 8; ++k) {
        auto a = sph[static_cast<std::size_t>(k)], b = g.sphere(k);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
        for (const auto& e : a) CHECK(g.word_length(e) == k);
    }
}

TEST_CASE("word length axioms") {
    std::mt19937_64 rng(12);
    for (const auto& G : {WordMetricGroup::lattice(3), WordMetricGroup::free_group(2)}) {
        std::vector<Element> pool;
        for (int k = 0; k <= 4; ++k)
            for (const auto& e : G.sphere(k)) pool.push_back(e);
        CHECK(G.word_length(G.identity()) == 0);
        for (int i = 0; i < 2000; ++i) {
            const auto& g = pool[rng() % pool.size()];
            const auto& h = pool[rng() % pool.size()];
            CHECK(G.word_length(G.inverse(g)) == G.word_length(g));
            CHECK(G.word_length(G.mul(g, h)) <= G.word_length(g) + G.word_length(h));
            if (G.word_length(g) == 0) CHECK(g == G.identity());
        }
    }
}

TEST_CASE("exponential growth is refused") {
    CHECK_NOTHROW(require_subexponential(WordMetricGroup::lattice(2)));
    try {
        require_subexponential(WordMetricGroup::free_group(2));
        FAIL("free group accepted");
    } catch (const kms::Error& e) {
        CHECK(e.kind() == kms::ErrorKind::Domain);
    }
}

TEST_CASE("cocycle identity holds on random triples") {
    for (const auto& m : {coboundary_model(), homomorphism_model(2.5), mixed_model(0.7, -1.5, 1009)})
        CHECK(cocycle_defect(m, 99, 10000) <= 1e-12);
}

TEST_CASE("limsup estimates") {
    const auto hom = homomorphism_model(1.0);
    const auto e = limsup_ratio(hom, 0, 1.0);
    CHECK(e.estimate == doctest::Approx(1.0));
    for (std::size_t n = 1; n < e.tail.size(); ++n) CHECK(e.tail[n] <= e.tail[n - 1] + 1e-15);
    CHECK(limsup_ratio(hom, 0, 0.0).estimate == 0);
    const auto cob = coboundary_model(1.0, 1009);
    for (int N : {16, 32, 64}) {
        const auto c = limsup_ratio(cob, 3, 1.0, N);
        CHECK(std::abs(c.estimate) <= 2.0 / (N / 2) + 1e-12);
    }
}

TEST_CASE("four-way classification") {
    CHECK(classify_spectrum(false, false) == SpectrumShape::Zero);
    CHECK(classify_spectrum(true, false) == SpectrumShape::NonNegative);
    CHECK(classify_spectrum(false, true) == SpectrumShape::NonPositive);
    CHECK(classify_spectrum(true, true) == SpectrumShape::Real);
    CHECK(classify_model(coboundary_model()).shape == SpectrumShape::Real);
    CHECK(classify_model(homomorphism_model(1)).shape == SpectrumShape::Zero);
    CHECK(classify_model(homomorphism_model(-3)).shape == SpectrumShape::Zero);
    CHECK(classify_model(mixed_model(0.5, 0.0, 1009)).shape == SpectrumShape::Real);
    CHECK(classify_model(mixed_model(0.5, 0.8, 1009)).shape == SpectrumShape::Zero);
}

TEST_CASE("measure nets") {
    const auto triv = model_from_preset("trivial", 0, 0, 7);
    const auto net = build_measure_net(triv, 0, 0.0, 0.3);
    // symmetric geometric weights e^{-|n| s}
    double z = 0;
    for (int n = -net.R; n <= net.R; ++n) z += std::exp(-0.3 * std::abs(n));
    for (const auto& a : net.atoms) CHECK(a.weight == doctest::Approx(std::exp(-0.3 * std::abs(a.g[0])) / z));
    const auto cob = coboundary_model();
    for (double s : {0.5, 0.1, 0.01}) {
        const auto n = build_measure_net(cob, 0, 1.0, s);
        CHECK(n.tail_mass < kNetTailRel);
        const auto cert = certify_measure_net(cob, n);
        CHECK(cert.pass);
        for (const auto& r : cert.rows) CHECK(r.measured <= r.bound + r.slack + 1e-13);
    }
    CHECK_THROWS(build_measure_net(cob, 0, 1.0, 0.0));
}

TEST_CASE("Omega_mu") {
    const auto mu = kms::conformal::ProbVector::uniform(1009);
    CHECK(omega_mu(coboundary_model(1.0, 1009), mu).on_generators[0] == doctest::Approx(0).epsilon(1e-12));
    const auto mixed = omega_mu(mixed_model(0.8, 1.7, 1009), mu);
    CHECK(mixed.on_generators[0] == doctest::Approx(1.7));
    CHECK(mixed.max_additivity_defect <= 1e-9);
    CHECK(omega_mu(homomorphism_model(1.0), kms::conformal::ProbVector::uniform(1)).on_generators[0] == doctest::Approx(1));
    std::vector<double> w(1009, 1.0);
    w[0] = 2;
    double s = 0;
    for (double v : w) s += v;
    for (auto& v : w) v /= s;
    CHECK_THROWS_AS(omega_mu(coboundary_model(1.0, 1009), kms::conformal::ProbVector(w)), kms::Error);
}

TEST_CASE("unknown presets") { CHECK_THROWS(model_from_preset("nope", 1, 1, 5)); }
