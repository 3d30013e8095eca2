#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "episignal/kmeans.hpp"  // sq_dist

namespace episignal::classify {

enum class KernelType { linear, rbf };

inline std::string kernel_name(KernelType k) {
    return k == KernelType::linear ? "linear" : "rbf";
}

inline double kernel_eval(KernelType kernel, double rbf_gamma, const std::vector<double>& a,
                          const std::vector<double>& b) {
    if (kernel == KernelType::linear) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    return std::exp(-rbf_gamma * topics::detail::sq_dist(a, b));
}

// One binary soft-margin machine trained by sequential minimal optimization
// (Platt's algorithm with deterministic second-choice fallbacks).
class BinarySvm {
public:
    // `kmat(i, j)` must return the kernel of training rows i and j.
    void train(const std::function<double(std::size_t, std::size_t)>& kmat,
               const std::vector<int>& y, double C, double tol = 1e-3) {
        const std::size_t n = y.size();
        n_ = n;
        y_ = y;
        C_ = C;
        tol_ = tol;
        alpha_.assign(n, 0.0);
        b_ = 0.0;
        errors_.resize(n);
        for (std::size_t i = 0; i < n; ++i) errors_[i] = -static_cast<double>(y[i]);

        const long long max_steps = 20000 + 600LL * static_cast<long long>(n);
        long long steps = 0;
        bool examine_all = true;
        std::size_t changed = 1;
        while ((changed > 0 || examine_all) && steps < max_steps) {
            changed = 0;
            for (std::size_t i = 0; i < n && steps < max_steps; ++i) {
                if (!examine_all && !is_unbound(i)) continue;
                changed += examine(i, kmat);
                ++steps;
            }
            if (examine_all) {
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
        }
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return b_; }

    // f(i) over the training set, from the error cache.
    double train_decision(std::size_t i) const { return errors_[i] + y_[i]; }

    // Worst KKT violation across the training set; <= tol after convergence.
    double kkt_violation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double margin = y_[i] * train_decision(i);
            if (alpha_[i] <= 0.0) {
                worst = std::max(worst, 1.0 - margin);
            } else if (alpha_[i] >= C_) {
                worst = std::max(worst, margin - 1.0);
            } else {
                worst = std::max(worst, std::fabs(margin - 1.0));
            }
        }
        return worst;
    }

private:
    bool is_unbound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < C_; }

    std::size_t examine(std::size_t i2, const std::function<double(std::size_t, std::size_t)>& kmat) {
        const double e2 = errors_[i2];
        const double r2 = e2 * y_[i2];
        if (!((r2 < -tol_ && alpha_[i2] < C_) || (r2 > tol_ && alpha_[i2] > 0.0))) return 0;
        // best |E1 - E2| among unbound points
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!is_unbound(i)) continue;
            const double gap = std::fabs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2, kmat)) return 1;
        for (std::size_t off = 1; off <= n_; ++off) {  // deterministic fallback sweeps
            const std::size_t i1 = (i2 + off) % n_;
            if (is_unbound(i1) && take_step(i1, i2, kmat)) return 1;
        }
        for (std::size_t off = 1; off <= n_; ++off) {
            const std::size_t i1 = (i2 + off) % n_;
            if (!is_unbound(i1) && take_step(i1, i2, kmat)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2,
                   const std::function<double(std::size_t, std::size_t)>& kmat) {
        if (i1 == i2) return false;
        const double a1_old = alpha_[i1];
        const double a2_old = alpha_[i2];
        const int y1 = y_[i1];
        const int y2 = y_[i2];
        const double e1 = errors_[i1];
        const double e2 = errors_[i2];
        const double s = static_cast<double>(y1 * y2);
        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(C_, C_ + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - C_);
            hi = std::min(C_, a1_old + a2_old);
        }
        if (lo >= hi) return false;
        const double k11 = kmat(i1, i1);
        const double k12 = kmat(i1, i2);
        const double k22 = kmat(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > 0.0) {
            a2 = a2_old + y2 * (e1 - e2) / eta;
            a2 = std::min(hi, std::max(lo, a2));
        } else {
            // objective at both clip ends (duplicate points make eta = 0)
            const double f1 = y1 * (e1 + b_) - a1_old * k11 - s * a2_old * k12;
            const double f2 = y2 * (e2 + b_) - a2_old * k22 - s * a1_old * k12;
            const double l1 = a1_old + s * (a2_old - lo);
            const double h1 = a1_old + s * (a2_old - hi);
            const double lo_obj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                                  s * lo * l1 * k12;
            const double hi_obj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                                  s * hi * h1 * k12;
            if (lo_obj < hi_obj - 1e-12) a2 = lo;
            else if (lo_obj > hi_obj + 1e-12) a2 = hi;
            else a2 = a2_old;
        }
        if (std::fabs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12)) return false;
        const double a1 = a1_old + s * (a2_old - a2);

        const double b_old = b_;
        const double b1 = e1 + y1 * (a1 - a1_old) * k11 + y2 * (a2 - a2_old) * k12 + b_;
        const double b2 = e2 + y1 * (a1 - a1_old) * k12 + y2 * (a2 - a2_old) * k22 + b_;
        if (a1 > 0.0 && a1 < C_) b_ = b1;
        else if (a2 > 0.0 && a2 < C_) b_ = b2;
        else b_ = 0.5 * (b1 + b2);

        alpha_[i1] = a1;
        alpha_[i2] = a2;
        const double d1 = y1 * (a1 - a1_old);
        const double d2 = y2 * (a2 - a2_old);
        const double db = b_old - b_;  // u = sum(alpha y K) - b, so E shifts by b_old - b_new
        for (std::size_t i = 0; i < n_; ++i) {
            errors_[i] += d1 * kmat(i1, i) + d2 * kmat(i2, i) + db;
        }
        return true;
    }

    std::size_t n_ = 0;
    std::vector<int> y_;
    double C_ = 1.0;
    double tol_ = 1e-3;
    std::vector<double> alpha_;
    std::vector<double> errors_;  // f(i) - y(i)
    double b_ = 0.0;
};

}  // namespace episignal::classify
