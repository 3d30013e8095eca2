#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "episignal/rng.hpp"

namespace episignal::topics {

struct KMeansResult {
    std::vector<std::size_t> assignments;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;  // within-cluster sum of squared distances
    int iterations = 0;
    std::vector<double> inertia_trace;  // SSE after each assignment step
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding. Ties in assignment go to the
// lower cluster index; an emptied cluster restarts at the point farthest from
// its current centroid. Deterministic given the seed.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                           std::uint64_t seed, int max_iters = 300, double tol = 1e-6) {
    const std::size_t n = points.size();
    if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
    if (k > n) throw std::invalid_argument("kmeans: k exceeds number of points");
    Rng rng(seed);

    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.below(n)]);
    std::vector<double> d2(n);
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            for (const auto& c : centroids) best = std::min(best, detail::sq_dist(points[i], c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centroids.push_back(points[rng.below(n)]);  // duplicate points
            continue;
        }
        const double u = rng.uniform01() * total;
        double acc = 0.0;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        centroids.push_back(points[pick]);
    }

    KMeansResult res;
    res.assignments.assign(n, 0);
    const std::size_t dim = points.front().size();
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            std::size_t best_k = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = detail::sq_dist(points[i], centroids[c]);
                if (d < best) {
                    best = d;
                    best_k = c;
                }
            }
            res.assignments[i] = best_k;
            sse += best;
        }
        res.inertia_trace.push_back(sse);
        std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[res.assignments[i]];
            for (std::size_t j = 0; j < dim; ++j) next[res.assignments[i]][j] += points[i][j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // revive with the point farthest from its own centroid
                double worst = -1.0;
                std::size_t pick = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = detail::sq_dist(points[i], centroids[res.assignments[i]]);
                    if (d > worst) {
                        worst = d;
                        pick = i;
                    }
                }
                next[c] = points[pick];
                res.assignments[pick] = c;
            } else {
                for (std::size_t j = 0; j < dim; ++j) next[c][j] /= static_cast<double>(counts[c]);
            }
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            shift = std::max(shift, std::sqrt(detail::sq_dist(centroids[c], next[c])));
        }
        centroids = std::move(next);
        if (shift < tol) {
            ++iter;
            break;
        }
    }
    // final assignment against settled centroids
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::max();
        std::size_t best_k = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double d = detail::sq_dist(points[i], centroids[c]);
            if (d < best) {
                best = d;
                best_k = c;
            }
        }
        res.assignments[i] = best_k;
        res.inertia += best;
    }
    res.centroids = std::move(centroids);
    res.iterations = iter;
    return res;
}

}  // namespace episignal::topics
