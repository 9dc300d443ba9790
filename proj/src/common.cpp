#include "kmsspec/common.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>
#include <algorithm>
#include <system_error>

namespace kms {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::FitFailure: return "fit-failure";
        case ErrorKind::Realization: return "realization";
        case ErrorKind::UnsupportedGenerator: return "unsupported-generator";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Construction: return "construction";
        case ErrorKind::Window: return "window";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::SizeCap: return "size-cap";
        case ErrorKind::Freeness: return "freeness-violation";
        case ErrorKind::Verification: return "verification";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

void LogSum::add(double x) {
    if (x == kNegInf) return;
    if (x <= max_) {
        acc_ += std::exp(x - max_);
    } else {
        acc_ = acc_ * std::exp(max_ - x) + 1.0;
        max_ = x;
    }
}

double LogSum::value() const {
    if (max_ == kNegInf) return kNegInf;
    return max_ + std::log(acc_);
}

double log_sum_exp(const std::vector<double>& xs) {
    LogSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

double log1p_exp(double x) {
    if (x > 0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + h * static_cast<double>(i);
    out.back() = hi;
    return out;
}

unsigned thread_count() {
    if (const char* env = std::getenv("KMS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> eval_grid(const Fn& f, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    const std::size_t workers = std::min<std::size_t>(thread_count(), (xs.size() + 255) / 256);
    if (workers <= 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
        return out;
    }
    std::vector<std::exception_ptr> errs(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (xs.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * chunk; i < std::min(xs.size(), (w + 1) * chunk); ++i) out[i] = f(xs[i]);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string dec(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_dec(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorKind::InvalidInput, "not a decimal number: '" + s + "'");
    return v;
}

}  // namespace kms
