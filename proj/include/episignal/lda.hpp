#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "episignal/corpus.hpp"
#include "episignal/rng.hpp"

namespace episignal::topics {

struct LdaModel {
    std::size_t n_topics = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<std::vector<double>> topic_word;  // [topic][vocab], rows sum to 1
    std::vector<std::vector<double>> doc_topic;   // [doc][topic], rows sum to 1
    std::uint64_t seed = 0;

    // Top-n vocabulary indices of a topic by probability, ties to the lower
    // vocab index (lexicographic, since vocab is sorted).
    std::vector<std::size_t> top_words(std::size_t topic, std::size_t n) const {
        const auto& row = topic_word.at(topic);
        std::vector<std::size_t> order(row.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return row[a] > row[b];
        });
        if (order.size() > n) order.resize(n);
        return order;
    }
};

struct LdaOptions {
    double alpha = -1.0;  // <= 0 resolves to 50 / n_topics
    double beta = 0.01;
    int iterations = 500;
    int quantization = 10;  // Q: pseudo-count ceiling per document
};

// Collapsed Gibbs sampling over TF-IDF pseudo-counts. Weights quantize to
// round(Q * w / max_w) per document so relevance, not raw frequency, drives
// the sampler; documents whose counts all vanish keep their single
// highest-weight token at count 1.
inline LdaModel lda_fit(const Corpus& corpus,
                        const std::vector<std::map<std::string, double>>& tfidf,
                        std::size_t n_topics, std::uint64_t seed, LdaOptions opts = {}) {
    if (n_topics < 1) throw std::invalid_argument("lda_fit: n_topics must be >= 1");
    if (corpus.documents.empty()) throw std::invalid_argument("lda_fit: empty corpus");
    if (tfidf.size() != corpus.documents.size()) {
        throw std::invalid_argument("lda_fit: tfidf/document count mismatch");
    }
    bool any_tokens = false;
    for (const auto& doc : corpus.documents) any_tokens |= !doc.empty();
    if (!any_tokens) throw std::invalid_argument("lda_fit: all documents are empty");

    const double alpha = opts.alpha > 0.0 ? opts.alpha : 50.0 / static_cast<double>(n_topics);
    const double beta = opts.beta;
    const std::size_t v = corpus.vocab.size();
    const std::size_t n_docs = corpus.documents.size();

    // token instances after quantization
    std::vector<std::vector<std::size_t>> doc_words(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        if (corpus.documents[d].empty()) continue;
        double max_w = 0.0;
        for (const auto& [word, w] : tfidf[d]) {
            (void)word;
            if (w > max_w) max_w = w;
        }
        if (max_w > 0.0) {
            for (const auto& [word, w] : tfidf[d]) {  // map order: lexicographic
                const long long c =
                    std::llround(static_cast<double>(opts.quantization) * w / max_w);
                for (long long i = 0; i < c; ++i) {
                    doc_words[d].push_back(corpus.vocab_index.at(word));
                }
            }
        }
        if (doc_words[d].empty()) {
            // all weights zero (e.g. every word in every document)
            std::size_t best = corpus.vocab_index.at(tfidf[d].begin()->first);
            double best_w = tfidf[d].begin()->second;
            for (const auto& [word, w] : tfidf[d]) {
                const std::size_t idx = corpus.vocab_index.at(word);
                if (w > best_w || (w == best_w && idx < best)) {
                    best = idx;
                    best_w = w;
                }
            }
            doc_words[d].push_back(best);
        }
    }

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> z(n_docs);
    std::vector<std::vector<long long>> n_dk(n_docs, std::vector<long long>(n_topics, 0));
    std::vector<std::vector<long long>> n_kw(n_topics, std::vector<long long>(v, 0));
    std::vector<long long> n_k(n_topics, 0);
    for (std::size_t d = 0; d < n_docs; ++d) {
        z[d].resize(doc_words[d].size());
        for (std::size_t i = 0; i < doc_words[d].size(); ++i) {
            const std::size_t k = static_cast<std::size_t>(rng.below(n_topics));
            z[d][i] = k;
            ++n_dk[d][k];
            ++n_kw[k][doc_words[d][i]];
            ++n_k[k];
        }
    }

    std::vector<double> probs(n_topics);
    const double vbeta = static_cast<double>(v) * beta;
    for (int it = 0; it < opts.iterations; ++it) {
        for (std::size_t d = 0; d < n_docs; ++d) {
            for (std::size_t i = 0; i < doc_words[d].size(); ++i) {
                const std::size_t w = doc_words[d][i];
                const std::size_t old_k = z[d][i];
                --n_dk[d][old_k];
                --n_kw[old_k][w];
                --n_k[old_k];
                double total = 0.0;
                for (std::size_t k = 0; k < n_topics; ++k) {
                    probs[k] = (static_cast<double>(n_dk[d][k]) + alpha) *
                               (static_cast<double>(n_kw[k][w]) + beta) /
                               (static_cast<double>(n_k[k]) + vbeta);
                    total += probs[k];
                }
                const double u = rng.uniform01() * total;
                double acc = 0.0;
                std::size_t new_k = n_topics - 1;
                for (std::size_t k = 0; k < n_topics; ++k) {
                    acc += probs[k];
                    if (u < acc) {
                        new_k = k;
                        break;
                    }
                }
                z[d][i] = new_k;
                ++n_dk[d][new_k];
                ++n_kw[new_k][w];
                ++n_k[new_k];
            }
        }
    }

    LdaModel model;
    model.n_topics = n_topics;
    model.alpha = alpha;
    model.beta = beta;
    model.seed = seed;
    model.doc_topic.assign(n_docs, std::vector<double>(n_topics, 0.0));
    for (std::size_t d = 0; d < n_docs; ++d) {
        const double denom = static_cast<double>(doc_words[d].size()) +
                             static_cast<double>(n_topics) * alpha;
        for (std::size_t k = 0; k < n_topics; ++k) {
            model.doc_topic[d][k] = (static_cast<double>(n_dk[d][k]) + alpha) / denom;
        }
    }
    model.topic_word.assign(n_topics, std::vector<double>(v, 0.0));
    for (std::size_t k = 0; k < n_topics; ++k) {
        const double denom = static_cast<double>(n_k[k]) + vbeta;
        for (std::size_t w = 0; w < v; ++w) {
            model.topic_word[k][w] = (static_cast<double>(n_kw[k][w]) + beta) / denom;
        }
    }
    return model;
}

}  // namespace episignal::topics
