#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kms {

enum class ErrorKind {
    InvalidInput,
    Numeric,
    FitFailure,
    Realization,
    UnsupportedGenerator,
    Domain,
    Construction,
    Window,
    Convergence,
    SizeCap,
    Freeness,
    Verification,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp with a running max shift.
class LogSum {
public:
    void add(double log_term);
    void add(double log_term, double log_mult) { add(log_term + log_mult); }
    double value() const;
    bool empty() const { return max_ == kNegInf; }

private:
    double max_ = kNegInf;
    double acc_ = 0.0;
};

double log_sum_exp(const std::vector<double>& xs);
double log1p_exp(double x);  // log(1 + e^x) without overflow

// Scalar function of beta.
using Fn = std::function<double(double)>;

std::vector<double> linspace(double lo, double hi, std::size_t n);

// Worker count from KMS_THREADS, else the hardware concurrency.
unsigned thread_count();
// f at every point, split over thread_count() workers; f must be safe to call concurrently.
std::vector<double> eval_grid(const Fn& f, const std::vector<double>& xs);

// Shortest round-trippable decimal rendering, at most 17 significant digits.
std::string dec(double x);
double parse_dec(const std::string& s);

void require(bool cond, ErrorKind kind, const std::string& msg);

}  // namespace kms
