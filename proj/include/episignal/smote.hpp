#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "episignal/kmeans.hpp"  // sq_dist
#include "episignal/rng.hpp"

namespace episignal::classify {

struct SmoteResult {
    std::vector<std::vector<double>> features;  // originals first, verbatim
    std::vector<int> labels;
};

// Synthetic minority oversampling: every class is brought up to the majority
// count with points interpolated between a random class member and one of its
// k nearest same-class neighbours, x + u * (x_nn - x), u ~ U(0, 1).
inline SmoteResult smote(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& labels, int k_neighbors, std::uint64_t seed) {
    if (features.size() != labels.size()) throw std::invalid_argument("smote: size mismatch");
    if (k_neighbors < 1) throw std::invalid_argument("smote: k_neighbors must be >= 1");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::size_t majority = 0;
    for (const auto& [cls, idx] : by_class) {
        if (idx.size() < 2) {
            throw std::runtime_error("smote: class " + std::to_string(cls) +
                                     " has fewer than 2 samples");
        }
        majority = std::max(majority, idx.size());
    }
    SmoteResult out{features, labels};
    Rng rng(seed);
    for (const auto& [cls, idx] : by_class) {  // ascending class order
        const std::size_t count = idx.size();
        const int k = std::min<int>(k_neighbors, static_cast<int>(count) - 1);
        for (std::size_t need = majority - count; need > 0; --need) {
            const std::size_t base = idx[rng.below(count)];
            // k nearest same-class neighbours, ties to the lower index
            std::vector<std::pair<double, std::size_t>> dist;
            dist.reserve(count - 1);
            for (std::size_t j : idx) {
                if (j == base) continue;
                dist.emplace_back(topics::detail::sq_dist(features[base], features[j]), j);
            }
            std::stable_sort(dist.begin(), dist.end(), [](const auto& a, const auto& b) {
                return a.first < b.first;
            });
            const std::size_t nn = dist[rng.below(static_cast<std::uint64_t>(k))].second;
            const double u = rng.uniform01();
            std::vector<double> synth(features[base].size());
            for (std::size_t d = 0; d < synth.size(); ++d) {
                synth[d] = features[base][d] + u * (features[nn][d] - features[base][d]);
            }
            out.features.push_back(std::move(synth));
            out.labels.push_back(cls);
        }
    }
    return out;
}

}  // namespace episignal::classify
