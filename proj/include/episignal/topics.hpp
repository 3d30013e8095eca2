#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "episignal/autoencoder.hpp"
#include "episignal/corpus.hpp"
#include "episignal/date.hpp"
#include "episignal/embedding.hpp"
#include "episignal/kmeans.hpp"
#include "episignal/lda.hpp"
#include "episignal/topic_metrics.hpp"

namespace episignal::topics {

// [gamma * theta || embedding]: gamma balances the topic-assignment block
// against the embedding block inside Euclidean clustering.
inline std::vector<double> cte_concat(const std::vector<double>& theta,
                                      const std::vector<double>& embedding, double gamma,
                                      std::size_t n_topics, std::size_t emb_dim) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    if (theta.size() != n_topics) throw std::invalid_argument("cte_concat: theta dim mismatch");
    if (embedding.size() != emb_dim) {
        throw std::invalid_argument("cte_concat: embedding dim mismatch");
    }
    std::vector<double> out;
    out.reserve(n_topics + emb_dim);
    for (double t : theta) out.push_back(gamma * t);
    out.insert(out.end(), embedding.begin(), embedding.end());
    return out;
}

struct TopicCluster {
    std::size_t cluster_id = 0;
    std::vector<std::string> member_ids;
    std::vector<std::pair<std::string, std::size_t>> top_words;  // count desc, <= 10
    Date day;
    std::string region;
    bool valid = false;  // more than two member tweets
};

// Aggregates per-cluster token counts and keeps the ten most frequent words,
// ties lexicographic. Clusters of two or fewer tweets are marked invalid.
inline std::vector<TopicCluster> extract_topics(
    const std::vector<std::size_t>& assignments,
    const std::vector<textprep::TokenizedTweet>& tweets, Date day, const std::string& region) {
    if (assignments.size() != tweets.size()) {
        throw std::invalid_argument("extract_topics: assignment/tweet count mismatch");
    }
    std::size_t k = 0;
    for (auto a : assignments) k = std::max(k, a + 1);
    std::vector<TopicCluster> out(k);
    std::vector<std::map<std::string, std::size_t>> counts(k);
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        const std::size_t c = assignments[i];
        out[c].member_ids.push_back(tweets[i].tweet_id);
        for (const auto& w : tweets[i].tokens) ++counts[c][w];
    }
    for (std::size_t c = 0; c < k; ++c) {
        out[c].cluster_id = c;
        out[c].day = day;
        out[c].region = region;
        out[c].valid = out[c].member_ids.size() > 2;
        std::vector<std::pair<std::string, std::size_t>> words(counts[c].begin(),
                                                               counts[c].end());
        std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (words.size() > 10) words.resize(10);
        out[c].top_words = std::move(words);
    }
    return out;
}

struct CteParams {
    std::size_t k = 7;
    double gamma = 0.5;
    LdaOptions lda;
    std::size_t embedding_dim = 64;  // used by the hashed provider
    AutoencoderConfig autoencoder;
    int kmeans_max_iters = 300;
    double kmeans_tol = 1e-6;
    std::uint64_t seed = 0;
};

struct CteResult {
    LdaModel lda;
    std::vector<std::vector<double>> cte_vectors;
    std::vector<std::vector<double>> latent;
    KMeansResult clustering;
    std::vector<TopicCluster> clusters;
    double coherence_score = 0.0;
    double silhouette_score = 0.0;
};

// The full engine for one document set: TF-IDF-weighted LDA, embeddings,
// gamma-concatenation, autoencoder compression and k-means, plus both
// quality metrics. Stage seeds derive from params.seed so any parallel
// schedule reproduces the sequential result.
inline CteResult run_cte(const std::vector<textprep::TokenizedTweet>& tweets,
                         const EmbeddingProvider& provider, const CteParams& params, Date day = {},
                         const std::string& region = {}) {
    CteResult res;
    Corpus corpus = Corpus::build(tweets);
    auto tfidf = compute_tfidf(corpus);
    res.lda = lda_fit(corpus, tfidf, params.k, derive_seed(params.seed, 1), params.lda);

    res.cte_vectors.reserve(tweets.size());
    for (std::size_t d = 0; d < tweets.size(); ++d) {
        auto emb = provider.embed(tweets[d].tweet_id, tweets[d].tokens);
        res.cte_vectors.push_back(
            cte_concat(res.lda.doc_topic[d], emb, params.gamma, params.k, provider.dim()));
    }

    AutoencoderConfig ae_cfg = params.autoencoder;
    ae_cfg.seed = derive_seed(params.seed, 2);
    Autoencoder ae = Autoencoder::fit(res.cte_vectors, ae_cfg);
    res.latent.reserve(res.cte_vectors.size());
    for (const auto& v : res.cte_vectors) res.latent.push_back(ae.encode(v));

    res.clustering = kmeans(res.latent, params.k, derive_seed(params.seed, 3),
                            params.kmeans_max_iters, params.kmeans_tol);
    res.clusters = extract_topics(res.clustering.assignments, tweets, day, region);

    std::vector<std::vector<std::string>> top_word_lists;
    for (const auto& c : res.clusters) {
        std::vector<std::string> words;
        for (const auto& [w, count] : c.top_words) {
            (void)count;
            words.push_back(w);
        }
        top_word_lists.push_back(std::move(words));
    }
    res.coherence_score = coherence(top_word_lists, corpus).average;
    res.silhouette_score = silhouette(res.latent, res.clustering.assignments);
    return res;
}

struct GridCell {
    std::size_t k = 0;
    double gamma = 0.0;
    bool ok = false;
    double coherence_score = 0.0;
    double silhouette_score = 0.0;
    std::string error;
};

struct TuneResult {
    std::size_t best_k = 0;
    double best_gamma = 0.0;
    std::vector<GridCell> cells;
};

// Full grid sweep; the winner has the lowest summed rank over descending
// coherence and descending silhouette, ties to smaller k then smaller gamma.
// Cells that fail (e.g. k = 1 leaves silhouette undefined) are excluded.
inline TuneResult tune_hyperparams(const std::vector<textprep::TokenizedTweet>& tweets,
                                   const EmbeddingProvider& provider, const CteParams& base,
                                   const std::vector<std::size_t>& k_grid,
                                   const std::vector<double>& gamma_grid, std::uint64_t seed) {
    TuneResult out;
    std::uint64_t cell_index = 0;
    for (std::size_t k : k_grid) {
        for (double gamma : gamma_grid) {
            GridCell cell;
            cell.k = k;
            cell.gamma = gamma;
            CteParams params = base;
            params.k = k;
            params.gamma = gamma;
            params.seed = derive_seed(seed, cell_index++);
            try {
                CteResult res = run_cte(tweets, provider, params);
                cell.ok = true;
                cell.coherence_score = res.coherence_score;
                cell.silhouette_score = res.silhouette_score;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            out.cells.push_back(cell);
        }
    }
    std::vector<const GridCell*> ok;
    for (const auto& c : out.cells) {
        if (c.ok) ok.push_back(&c);
    }
    if (ok.empty()) throw std::runtime_error("tune_hyperparams: every grid cell failed");
    auto rank_of = [&](const GridCell* cell, auto metric) {
        std::size_t rank = 0;
        for (const auto* other : ok) {
            if (metric(other) > metric(cell)) ++rank;
        }
        return rank;
    };
    const GridCell* best = nullptr;
    std::size_t best_sum = 0;
    for (const auto* cell : ok) {
        const std::size_t sum =
            rank_of(cell, [](const GridCell* c) { return c->coherence_score; }) +
            rank_of(cell, [](const GridCell* c) { return c->silhouette_score; });
        const bool better =
            !best || sum < best_sum ||
            (sum == best_sum &&
             (cell->k < best->k || (cell->k == best->k && cell->gamma < best->gamma)));
        if (better) {
            best = cell;
            best_sum = sum;
        }
    }
    out.best_k = best->k;
    out.best_gamma = best->gamma;
    return out;
}

namespace detail {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues and the matching eigenvectors as columns.
inline void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& values,
                         std::vector<std::vector<double>>& vectors) {
    const std::size_t n = a.size();
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p][i];
                    const double aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = vectors[i][p];
                    const double viq = vectors[i][q];
                    vectors[i][p] = c * vip - s * viq;
                    vectors[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
}

}  // namespace detail

// Projection onto the top two principal components (population covariance,
// mean-centered). Sign convention: the largest-magnitude loading of each
// component is positive. Zero-variance input maps to the origin.
inline std::vector<std::array<double, 2>> project_2d(
    const std::vector<std::vector<double>>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw std::invalid_argument("project_2d: need at least 2 points");
    const std::size_t d = points.front().size();
    std::vector<double> center(d, 0.0);
    for (const auto& p : points) {
        for (std::size_t j = 0; j < d; ++j) center[j] += p[j];
    }
    for (double& c : center) c /= static_cast<double>(n);
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& p : points) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) {
                cov[i][j] += (p[i] - center[i]) * (p[j] - center[j]);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n);
            cov[j][i] = cov[i][j];
        }
    }
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    detail::jacobi_eigen(cov, values, vectors);
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    std::vector<std::array<double, 2>> out(n, {0.0, 0.0});
    for (std::size_t comp = 0; comp < 2 && comp < d; ++comp) {
        const std::size_t col = order[comp];
        if (values[col] <= 1e-12) continue;  // no variance along this axis
        std::vector<double> axis(d);
        for (std::size_t i = 0; i < d; ++i) axis[i] = vectors[i][col];
        std::size_t peak = 0;
        for (std::size_t i = 1; i < d; ++i) {
            if (std::fabs(axis[i]) > std::fabs(axis[peak])) peak = i;
        }
        if (axis[peak] < 0.0) {
            for (double& v : axis) v = -v;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += (points[i][j] - center[j]) * axis[j];
            out[i][comp] = acc;
        }
    }
    return out;
}

}  // namespace episignal::topics
