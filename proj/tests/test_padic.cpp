#include "doctest.h"
#include "kmsspec/padic.hpp"

using namespace kms::padic;

namespace {
Mat2 M(long a, long b, long c, long d) { return {Int(a), Int(b), Int(c), Int(d)}; }
}  // namespace

TEST_CASE("named generators") {
    CHECK(generator("g1") == M(1, 8, 0, 1));
    CHECK(generator("g2") == M(1, 0, 8, 1));
    CHECK(generator("ab") == M(5, 2, 2, 1));
    CHECK(generator("h", 0) == M(1, 2, 2, 5));
    CHECK(generator("g1") * generator("g2") == M(65, 8, 8, 1));
    Mat2 p = Mat2::identity();
    for (int n = 1; n <= 20; ++n) {
        p = p * generator("g1");
        CHECK(p == M(1, 8 * n, 0, 1));
    }
    for (int n = -3; n <= 3; ++n) {
        const auto h = generator("h", n);
        CHECK(h.det() == 1);
        CHECK((h * h.inverse()).is_identity());
    }
    CHECK_THROWS(generator("h"));
}

TEST_CASE("word reduction") {
    CHECK(FreeWord::reduced({0, 1}).letters.empty());
    CHECK(FreeWord::reduced({2, 0, 1, 3, 4}).letters == std::vector<int>{4});
    CHECK(FreeWord::reduced({0, 2, 5}).is_reduced());
    const auto alpha = Alphabet::standard(-1, 1);
    CHECK(alpha.letters() == 10);
    CHECK(eval_word(FreeWord{}, alpha).is_identity());
    CHECK(eval_word(FreeWord{{alpha.find("g1"), alpha.find("g2")}}, alpha) == M(65, 8, 8, 1));
}

TEST_CASE("reduced word counts") {
    CHECK(count_reduced_words(4, 1) == 4);
    CHECK(count_reduced_words(4, 2) == 4 + 12);
    CHECK(count_reduced_words(14, 3) == 14 + 14 * 13 + 14 * 169);
}

TEST_CASE("freeness") {
    const auto g_only = Alphabet::standard(0, -1);  // no h letters
    CHECK(g_only.letters() == 4);
    CHECK(freeness_direct(1, g_only).all_nontrivial);
    CHECK(freeness_direct(4, g_only).all_nontrivial);
    const auto small = freeness_suite(6, -1, 1);
    CHECK(small.all_nontrivial);
    CHECK(small.words_checked == count_reduced_words(10, 6));
    // the split method agrees with direct enumeration where both are cheap
    const auto alpha = Alphabet::standard(-1, 1);
    const auto d = freeness_direct(5, alpha), s = freeness_split(5, alpha);
    CHECK(d.all_nontrivial == s.all_nontrivial);
    CHECK(d.words_checked == s.words_checked);
}

TEST_CASE("closures mod p^N") {
    const std::vector<Mat2> gens{generator("g1"), generator("g2")};
    CHECK(sl2_order(3, 1) == 24);
    CHECK(sl2_order(3, 2) == 648);
    CHECK(sl2_order(5, 1) == 120);
    const auto c1 = subgroup_closure_mod(3, 1, gens);
    CHECK(c1.order == 24);
    CHECK(c1.is_full);
    const auto c2 = subgroup_closure_mod(3, 2, gens);
    CHECK(c2.order == 648);
    CHECK(c2.is_full);
    CHECK(c2.divides);
    CHECK_THROWS(subgroup_closure_mod(2, 1, gens));
    CHECK(is_odd_prime(3));
    CHECK_FALSE(is_odd_prime(2));
    CHECK_FALSE(is_odd_prime(9));
    const auto r = reduce(M(-1, 10, 0, -1), 3, 2);
    CHECK(r.a == 8);
    CHECK(r.b == 1);
    CHECK(r.d == 8);
}
