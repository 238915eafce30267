#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace clrbm {

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;

/// ln cosh(a) computed as |a| - ln2 + ln(1 + e^{-2|a|}); never overflows,
/// accurate for both tiny and huge arguments.
inline double log_cosh(double a) {
    const double t = std::abs(a);
    return t - kLn2 + std::log1p(std::exp(-2.0 * t));
}

/// ln(1 + e^t) without overflow for large |t|.
inline double log1p_exp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

/// Logistic function 1 / (1 + e^{-z}) without overflow on either tail.
inline double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Streaming max-shifted log-sum-exp accumulator. Insertion order is part
/// of the result contract: callers that need run-to-run stable sums must
/// feed values in a fixed order.
class LogSumExp {
public:
    void add(double v) {
        if (std::isnan(v)) {
            sum_ = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        if (v == -std::numeric_limits<double>::infinity()) return;
        if (v <= max_) {
            sum_ += std::exp(v - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - v) + 1.0;
            max_ = v;
        }
    }

    double value() const {
        if (std::isnan(sum_)) return sum_;
        if (max_ == -std::numeric_limits<double>::infinity()) return max_;
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

/// Shortest decimal representation that round-trips the exact double.
/// Every file format in this project uses it so that written values can be
/// read back bit-identically.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("cannot parse real number: '" + s + "'");
    }
    return v;
}

} // namespace clrbm
