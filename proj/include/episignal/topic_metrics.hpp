#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "episignal/corpus.hpp"
#include "episignal/kmeans.hpp"

namespace episignal::topics {

struct CoherenceResult {
    double average = 0.0;
    std::size_t scored_topics = 0;
    std::size_t skipped_topics = 0;  // fewer than 2 in-vocab words
};

// Intrinsic (UMass-style) coherence: for ordered word pairs (w_i
// earlier-ranked, w_j), the mean of ln((D(w_i, w_j) + 1) / D(w_j)) computed
// from document co-occurrence, averaged over topics.
inline CoherenceResult coherence(const std::vector<std::vector<std::string>>& topics,
                                 const Corpus& corpus) {
    CoherenceResult out;
    double sum = 0.0;
    for (const auto& topic : topics) {
        std::vector<std::size_t> words;
        for (const auto& w : topic) {
            auto it = corpus.vocab_index.find(w);
            if (it != corpus.vocab_index.end()) words.push_back(it->second);
        }
        if (words.size() < 2) {
            ++out.skipped_topics;
            continue;
        }
        double topic_sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < words.size(); ++i) {
            for (std::size_t j = i + 1; j < words.size(); ++j) {
                std::size_t co = 0;
                for (const auto& doc : corpus.documents) {
                    bool has_i = false, has_j = false;
                    for (const auto& w : doc) {
                        const auto idx = corpus.vocab_index.at(w);
                        has_i |= idx == words[i];
                        has_j |= idx == words[j];
                    }
                    co += has_i && has_j;
                }
                const double dj = static_cast<double>(corpus.doc_freq[words[j]]);
                topic_sum += std::log((static_cast<double>(co) + 1.0) / dj);
                ++pairs;
            }
        }
        sum += topic_sum / static_cast<double>(pairs);
        ++out.scored_topics;
    }
    if (out.scored_topics == 0) {
        throw std::runtime_error("coherence: no topic has 2 in-vocabulary words");
    }
    out.average = sum / static_cast<double>(out.scored_topics);
    return out;
}

// Mean silhouette with Euclidean distance. Points in singleton clusters
// contribute 0, as does the a = b = 0 degenerate case.
inline double silhouette(const std::vector<std::vector<double>>& points,
                         const std::vector<std::size_t>& assignments) {
    const std::size_t n = points.size();
    if (assignments.size() != n) throw std::invalid_argument("silhouette: size mismatch");
    std::set<std::size_t> labels(assignments.begin(), assignments.end());
    if (labels.size() < 2) throw std::runtime_error("silhouette undefined for a single cluster");
    const std::size_t k = *labels.rbegin() + 1;
    std::vector<std::size_t> counts(k, 0);
    for (auto a : assignments) ++counts[a];

    double total = 0.0;
    std::vector<double> mean_dist(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignments[i]] == 1) continue;  // singleton scores 0
        std::vector<double> dist_sum(k, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            dist_sum[assignments[j]] += std::sqrt(detail::sq_dist(points[i], points[j]));
        }
        const std::size_t own = assignments[i];
        const double a = dist_sum[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::max();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, dist_sum[c] / static_cast<double>(counts[c]));
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

}  // namespace episignal::topics
