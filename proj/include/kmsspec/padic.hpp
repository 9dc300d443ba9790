#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "kmsspec/common.hpp"

namespace kms::padic {

using Int = boost::multiprecision::cpp_int;

// Exact 2x2 integer matrix (a b; c d).
struct Mat2 {
    Int a{1}, b{0}, c{0}, d{1};

    static Mat2 identity() { return {}; }
    Mat2 operator*(const Mat2& o) const;
    bool operator==(const Mat2& o) const = default;
    Int det() const { return a * d - b * c; }
    // Requires det = 1.
    Mat2 inverse() const;
    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
    std::string str() const;
};

struct Mat2Mod {
    std::uint64_t a = 1, b = 0, c = 0, d = 1;
    std::uint64_t m = 1;  // modulus p^N

    Mat2Mod operator*(const Mat2Mod& o) const;
    bool operator==(const Mat2Mod& o) const = default;
    std::uint64_t det() const;
    Mat2Mod inverse() const;
    std::uint64_t key() const { return ((a * m + b) * m + c) * m + d; }
};

std::uint64_t ipow(std::uint64_t p, int n);
bool is_odd_prime(std::uint64_t p);
Mat2Mod reduce(const Mat2& x, std::uint64_t p, int N);

// name in {a, b, ab, g1, g2, h}; n is required for h.
Mat2 generator(const std::string& name, std::optional<int> n = std::nullopt);

// Letters come in pairs: 2i is generator i, 2i+1 its inverse.
class Alphabet {
public:
    static Alphabet standard(int h_lo, int h_hi, bool with_g = true);

    std::size_t letters() const { return mats_.size(); }
    static int inverse_letter(int l) { return l ^ 1; }
    const Mat2& matrix(int l) const { return mats_[static_cast<std::size_t>(l)]; }
    const std::string& name(int l) const { return names_[static_cast<std::size_t>(l)]; }
    int find(const std::string& name) const;

private:
    std::vector<Mat2> mats_;
    std::vector<std::string> names_;
};

struct FreeWord {
    std::vector<int> letters;

    // Cancels adjacent inverse pairs until none remain.
    static FreeWord reduced(std::vector<int> letters);
    bool is_reduced() const;
};

Mat2 eval_word(const FreeWord& w, const Alphabet& alpha);
Mat2Mod eval_word_mod(const FreeWord& w, const Alphabet& alpha, std::uint64_t p, int N);

struct ClosureResult {
    std::uint64_t p = 0;
    int N = 0;
    std::uint64_t order = 0;
    std::uint64_t expected = 0;
    bool is_full = false;
    bool divides = false;  // Lagrange
};

inline constexpr std::uint64_t kClosureCap = 10'000'000;

std::uint64_t sl2_order(std::uint64_t p, int N);
ClosureResult subgroup_closure_mod(std::uint64_t p, int N, const std::vector<Mat2>& gens);

struct FreenessCertificate {
    int max_len = 0;
    int h_lo = 0, h_hi = 0;
    std::size_t alphabet_size = 0;
    Int words_checked = 0;       // reduced nonempty words of length <= max_len covered
    std::uint64_t evaluated = 0;  // matrices actually multiplied out
    std::string method;
    bool all_nontrivial = false;
};

// Direct depth-first enumeration of every reduced word.
FreenessCertificate freeness_direct(int max_len, const Alphabet& alpha);
// Injectivity of evaluation on reduced words of length <= ceil(max_len/2). Any reduced word
// of length L <= max_len splits as u v with u != v^-1 as words, so uv = 1 would force a
// collision between two distinct short reduced words.
FreenessCertificate freeness_split(int max_len, const Alphabet& alpha);
// max_len <= 10; direct up to length 5, split beyond.
FreenessCertificate freeness_suite(int max_len, int h_lo = -2, int h_hi = 2, bool with_g = true);

Int count_reduced_words(std::size_t alphabet, int max_len);

nlohmann::json certificate_json(const ClosureResult& c, const FreenessCertificate& f);

}  // namespace kms::padic
