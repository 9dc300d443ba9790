#include "kmsspec/padic.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace kms::padic {

using u128 = unsigned __int128;

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mat2 Mat2::inverse() const {
    require(det() == 1, ErrorKind::InvalidInput, "inverse needs determinant 1");
    return {d, -b, -c, a};
}

std::string Mat2::str() const {
    return "(" + a.str() + " " + b.str() + "; " + c.str() + " " + d.str() + ")";
}

static std::uint64_t mulmod(std::uint64_t x, std::uint64_t y, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<u128>(x) * y) % m);
}

Mat2Mod Mat2Mod::operator*(const Mat2Mod& o) const {
    Mat2Mod r;
    r.m = m;
    r.a = (mulmod(a, o.a, m) + mulmod(b, o.c, m)) % m;
    r.b = (mulmod(a, o.b, m) + mulmod(b, o.d, m)) % m;
    r.c = (mulmod(c, o.a, m) + mulmod(d, o.c, m)) % m;
    r.d = (mulmod(c, o.b, m) + mulmod(d, o.d, m)) % m;
    return r;
}

std::uint64_t Mat2Mod::det() const { return (mulmod(a, d, m) + m - mulmod(b, c, m)) % m; }

Mat2Mod Mat2Mod::inverse() const {
    require(det() == 1 % m, ErrorKind::InvalidInput, "inverse needs determinant 1");
    return {d, (m - b) % m, (m - c) % m, a, m};
}

std::uint64_t ipow(std::uint64_t p, int n) {
    std::uint64_t r = 1;
    for (int i = 0; i < n; ++i) r *= p;
    return r;
}

bool is_odd_prime(std::uint64_t p) {
    if (p < 3 || p % 2 == 0) return false;
    for (std::uint64_t q = 3; q * q <= p; q += 2)
        if (p % q == 0) return false;
    return true;
}

static std::uint64_t mod_of(const Int& x, std::uint64_t m) {
    Int r = x % m;
    if (r < 0) r += m;
    return r.convert_to<std::uint64_t>();
}

Mat2Mod reduce(const Mat2& x, std::uint64_t p, int N) {
    const std::uint64_t m = ipow(p, N);
    return {mod_of(x.a, m), mod_of(x.b, m), mod_of(x.c, m), mod_of(x.d, m), m};
}

static Mat2 mpow(const Mat2& x, int n) {
    Mat2 base = n < 0 ? x.inverse() : x;
    Mat2 r;
    for (int i = 0; i < std::abs(n); ++i) r = r * base;
    return r;
}

Mat2 generator(const std::string& name, std::optional<int> n) {
    const Mat2 a{1, 2, 0, 1};
    const Mat2 b{1, 0, 2, 1};
    if (name == "a") return a;
    if (name == "b") return b;
    if (name == "ab") return a * b;
    if (name == "ba") return b * a;
    if (name == "g1") return mpow(a, 4);
    if (name == "g2") return mpow(b, 4);
    if (name == "h") {
        require(n.has_value(), ErrorKind::InvalidInput, "h needs an index n");
        const Mat2 ab = a * b;
        return mpow(ab, *n) * (b * a) * mpow(ab, -*n);
    }
    throw Error(ErrorKind::InvalidInput, "unknown generator '" + name + "'");
}

Alphabet Alphabet::standard(int h_lo, int h_hi, bool with_g) {
    Alphabet al;
    auto push = [&](const std::string& nm, const Mat2& m) {
        al.mats_.push_back(m);
        al.names_.push_back(nm);
        al.mats_.push_back(m.inverse());
        al.names_.push_back(nm + "^-1");
    };
    if (with_g) {
        push("g1", generator("g1"));
        push("g2", generator("g2"));
    }
    for (int n = h_lo; n <= h_hi; ++n) push("h" + std::to_string(n), generator("h", n));
    return al;
}

int Alphabet::find(const std::string& nm) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == nm) return static_cast<int>(i);
    throw Error(ErrorKind::InvalidInput, "letter not in alphabet: " + nm);
}

FreeWord FreeWord::reduced(std::vector<int> letters) {
    FreeWord w;
    for (int l : letters) {
        if (!w.letters.empty() && w.letters.back() == Alphabet::inverse_letter(l))
            w.letters.pop_back();
        else
            w.letters.push_back(l);
    }
    return w;
}

bool FreeWord::is_reduced() const {
    for (std::size_t i = 1; i < letters.size(); ++i)
        if (letters[i] == Alphabet::inverse_letter(letters[i - 1])) return false;
    return true;
}

Mat2 eval_word(const FreeWord& w, const Alphabet& alpha) {
    require(w.is_reduced(), ErrorKind::InvalidInput, "word is not reduced");
    Mat2 r;
    for (int l : w.letters) r = r * alpha.matrix(l);
    return r;
}

Mat2Mod eval_word_mod(const FreeWord& w, const Alphabet& alpha, std::uint64_t p, int N) {
    Mat2Mod r{1, 0, 0, 1, ipow(p, N)};
    for (int l : w.letters) r = r * reduce(alpha.matrix(l), p, N);
    return r;
}

std::uint64_t sl2_order(std::uint64_t p, int N) { return ipow(p, 3 * N - 2) * (p * p - 1); }

ClosureResult subgroup_closure_mod(std::uint64_t p, int N, const std::vector<Mat2>& gens) {
    require(is_odd_prime(p), ErrorKind::InvalidInput, "p must be an odd prime");
    require(N >= 1, ErrorKind::InvalidInput, "level N must be >= 1");
    require(ipow(p, 3 * N) <= kClosureCap, ErrorKind::SizeCap, "p^(3N) exceeds the enumeration cap");
    const std::uint64_t m = ipow(p, N);
    std::vector<Mat2Mod> step;
    for (const auto& g : gens) {
        auto r = reduce(g, p, N);
        require(r.det() == 1 % m, ErrorKind::InvalidInput, "generator is not in SL(2)");
        step.push_back(r);
        step.push_back(r.inverse());
    }
    std::unordered_set<std::uint64_t> seen;
    std::deque<Mat2Mod> frontier;
    Mat2Mod id{1 % m, 0, 0, 1 % m, m};
    seen.insert(id.key());
    frontier.push_back(id);
    while (!frontier.empty()) {
        Mat2Mod x = frontier.front();
        frontier.pop_front();
        for (const auto& s : step) {
            Mat2Mod y = x * s;
            if (seen.insert(y.key()).second) {
                if (seen.size() > kClosureCap) throw Error(ErrorKind::SizeCap, "closure exceeded cap");
                frontier.push_back(y);
            }
        }
    }
    ClosureResult res;
    res.p = p;
    res.N = N;
    res.order = seen.size();
    res.expected = sl2_order(p, N);
    res.is_full = res.order == res.expected;
    res.divides = res.expected % res.order == 0;
    return res;
}

Int count_reduced_words(std::size_t alphabet, int max_len) {
    Int total = 0, level = alphabet;
    for (int L = 1; L <= max_len; ++L) {
        total += level;
        level *= alphabet - 1;
    }
    return total;
}

FreenessCertificate freeness_direct(int max_len, const Alphabet& alpha) {
    FreenessCertificate cert;
    cert.max_len = max_len;
    cert.alphabet_size = alpha.letters();
    cert.method = "direct";
    cert.all_nontrivial = true;
    std::vector<int> word;
    std::function<void(const Mat2&)> dfs = [&](const Mat2& prefix) {
        if (static_cast<int>(word.size()) == max_len) return;
        for (int l = 0; l < static_cast<int>(alpha.letters()); ++l) {
            if (!word.empty() && l == Alphabet::inverse_letter(word.back())) continue;
            Mat2 next = prefix * alpha.matrix(l);
            ++cert.evaluated;
            word.push_back(l);
            if (next.is_identity()) {
                std::string w;
                for (int x : word) w += alpha.name(x) + " ";
                throw Error(ErrorKind::Freeness, "reduced word evaluates to the identity: " + w);
            }
            dfs(next);
            word.pop_back();
        }
    };
    dfs(Mat2::identity());
    cert.words_checked = cert.evaluated;
    return cert;
}

FreenessCertificate freeness_split(int max_len, const Alphabet& alpha) {
    FreenessCertificate cert;
    cert.max_len = max_len;
    cert.alphabet_size = alpha.letters();
    cert.method = "split";
    const int half = (max_len + 1) / 2;
    std::unordered_map<std::string, std::vector<int>> seen;
    seen.emplace(Mat2::identity().str(), std::vector<int>{});
    std::vector<int> word;
    std::function<void(const Mat2&)> dfs = [&](const Mat2& prefix) {
        if (static_cast<int>(word.size()) == half) return;
        for (int l = 0; l < static_cast<int>(alpha.letters()); ++l) {
            if (!word.empty() && l == Alphabet::inverse_letter(word.back())) continue;
            Mat2 next = prefix * alpha.matrix(l);
            ++cert.evaluated;
            word.push_back(l);
            auto [it, fresh] = seen.emplace(next.str(), word);
            if (!fresh) {
                std::string w;
                for (int x : word) w += alpha.name(x) + " ";
                throw Error(ErrorKind::Freeness, "two reduced words share a matrix: " + w);
            }
            dfs(next);
            word.pop_back();
        }
    };
    dfs(Mat2::identity());
    cert.words_checked = count_reduced_words(alpha.letters(), max_len);
    cert.all_nontrivial = true;
    return cert;
}

FreenessCertificate freeness_suite(int max_len, int h_lo, int h_hi, bool with_g) {
    require(max_len >= 1 && max_len <= 10, ErrorKind::InvalidInput, "max_len must be in [1, 10]");
    const Alphabet alpha = Alphabet::standard(h_lo, h_hi, with_g);
    auto direct = freeness_direct(std::min(max_len, 5), alpha);
    FreenessCertificate out = direct;
    if (max_len > 5) {
        auto split = freeness_split(max_len, alpha);
        out.words_checked = split.words_checked;
        out.evaluated += split.evaluated;
        out.method = "direct<=5+split";
    }
    out.max_len = max_len;
    out.h_lo = h_lo;
    out.h_hi = h_hi;
    return out;
}

nlohmann::json certificate_json(const ClosureResult& c, const FreenessCertificate& f) {
    nlohmann::json j;
    j["p"] = c.p;
    j["N"] = c.N;
    j["group_order"] = c.order;
    j["expected_order"] = c.expected;
    j["words_checked"] = f.words_checked.str();
    j["max_len"] = f.max_len;
    return j;
}

}  // namespace kms::padic
