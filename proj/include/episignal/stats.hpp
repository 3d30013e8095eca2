#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace episignal {

inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpmin) d = kFpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::betacf(a, b, x) / a;
    }
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value of a Student-t statistic with df degrees of freedom.
inline double t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    return ibeta(df / 2.0, 0.5, df / (df + t * t));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct PearsonResult {
    double r;
    double p;
    std::size_t n;
};

// Product-moment correlation with the usual t-based two-sided p-value.
// Requires n >= 3 and nonconstant inputs.
inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("pearson: need at least 3 samples");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
    double r = sxy / std::sqrt(sxx * syy);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    const double df = static_cast<double>(n - 2);
    double p;
    if (1.0 - r * r <= 0.0) {
        p = 0.0;
    } else {
        const double t = r * std::sqrt(df / (1.0 - r * r));
        p = t_two_sided_p(t, df);
    }
    return {r, p, n};
}

enum class TrendDirection { up, down, none };

inline std::string trend_direction_name(TrendDirection d) {
    switch (d) {
        case TrendDirection::up: return "up";
        case TrendDirection::down: return "down";
        default: return "none";
    }
}

struct TrendResult {
    TrendDirection direction;
    double p;
    long long s;   // Mann-Kendall S statistic
    double var_s;  // tie-corrected variance
};

// Mann-Kendall trend test with normal approximation and tie correction.
inline TrendResult mann_kendall(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 8) throw std::invalid_argument("mann_kendall: need at least 8 observations");
    long long s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (x[j] > x[i]) ++s;
            else if (x[j] < x[i]) --s;
        }
    }
    std::map<double, std::size_t> ties;
    for (double v : x) ++ties[v];
    double var_s = static_cast<double>(n) * (n - 1.0) * (2.0 * n + 5.0);
    for (const auto& [value, t] : ties) {
        (void)value;
        if (t > 1) var_s -= static_cast<double>(t) * (t - 1.0) * (2.0 * t + 5.0);
    }
    var_s /= 18.0;
    double p;
    if (s == 0 || var_s == 0.0) {
        p = 1.0;
    } else {
        const double z = (s > 0 ? s - 1.0 : s + 1.0) / std::sqrt(var_s);
        p = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
    }
    TrendDirection dir = TrendDirection::none;
    if (p < 0.05 && s > 0) dir = TrendDirection::up;
    else if (p < 0.05 && s < 0) dir = TrendDirection::down;
    return {dir, p, s, var_s};
}

}  // namespace episignal
