#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gpncast/common.hpp"

namespace gpncast {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw ValidationError("mean of empty vector");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Variance with selectable denominator: ddof=0 population, ddof=1 sample.
inline double variance(const std::vector<double>& v, int ddof = 1) {
    const auto n = static_cast<long>(v.size());
    if (n - ddof <= 0) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(n - ddof);
}

inline double stddev(const std::vector<double>& v, int ddof = 1) {
    return std::sqrt(variance(v, ddof));
}

/// Quantile with linear interpolation between order statistics
/// (the "linear" / type-7 convention). q in [0, 1].
inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) throw ValidationError("percentile of empty vector");
    if (q < 0.0 || q > 1.0) throw ValidationError("percentile q out of [0,1]");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return v[lo];
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

namespace detail {

/// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

inline double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

/// Two-sided p-value for a Student-t statistic with df degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw ValidationError("t-test requires df > 0");
    if (!std::isfinite(t)) return 0.0;
    const double x = df / (df + t * t);
    return incbeta(df / 2.0, 0.5, x);
}

}  // namespace gpncast
