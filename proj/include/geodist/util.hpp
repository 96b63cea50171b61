#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace geodist {

using BigInt = boost::multiprecision::cpp_int;
using i64 = long long;
using u64 = unsigned long long;

// Floor of sqrt(n) for n >= 0, exact.
inline i64 isqrt64(i64 n) {
    if (n < 0) throw std::invalid_argument("isqrt64: negative");
    if (n == 0) return 0;
    i64 r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool is_square64(i64 n) {
    if (n < 0) return false;
    i64 r = isqrt64(n);
    return r * r == n;
}

inline BigInt isqrt_big(const BigInt& n) {
    if (n < 0) throw std::invalid_argument("isqrt_big: negative");
    return boost::multiprecision::sqrt(n);
}

inline bool is_square_big(const BigInt& n) {
    if (n < 0) return false;
    BigInt r = isqrt_big(n);
    return r * r == n;
}

// log of a positive big integer, accurate to ~1 ulp even when the value
// does not fit in a double.
inline double log_big(const BigInt& x) {
    if (x <= 0) throw std::invalid_argument("log_big: nonpositive");
    const unsigned bits = boost::multiprecision::msb(x);
    if (bits <= 900) return std::log(x.convert_to<double>());
    const unsigned shift = bits - 64;
    BigInt hi = x >> shift;
    return std::log(hi.convert_to<double>()) + static_cast<double>(shift) * 0.6931471805599453;
}

// Compensated accumulator; used wherever sums must be reproducible
// independent of how work is batched.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

unsigned default_thread_count();

// Runs fn(i) for i in [0, n). Batches are indexed deterministically, so
// any per-index output is identical no matter how many threads execute.
void run_indexed(std::size_t n, const std::function<void(std::size_t)>& fn,
                 unsigned threads = 0);

} // namespace geodist
