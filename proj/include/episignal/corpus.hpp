#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "episignal/textprep.hpp"

namespace episignal::topics {

struct Corpus {
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> documents;
    std::vector<std::string> vocab;  // sorted, duplicate-free
    std::unordered_map<std::string, std::size_t> vocab_index;
    std::vector<std::size_t> doc_freq;

    static Corpus build(const std::vector<textprep::TokenizedTweet>& tweets) {
        Corpus c;
        std::set<std::string> words;
        for (const auto& t : tweets) {
            c.ids.push_back(t.tweet_id);
            c.documents.push_back(t.tokens);
            for (const auto& w : t.tokens) words.insert(w);
        }
        c.vocab.assign(words.begin(), words.end());
        for (std::size_t i = 0; i < c.vocab.size(); ++i) c.vocab_index[c.vocab[i]] = i;
        c.doc_freq.assign(c.vocab.size(), 0);
        for (const auto& doc : c.documents) {
            std::set<std::size_t> seen;
            for (const auto& w : doc) seen.insert(c.vocab_index.at(w));
            for (auto idx : seen) ++c.doc_freq[idx];
        }
        return c;
    }

    std::size_t document_frequency(const std::string& word) const {
        auto it = vocab_index.find(word);
        return it == vocab_index.end() ? 0 : doc_freq[it->second];
    }
};

// weight(w, d) = tf(w, d) * ln(N / df(w)) with raw term counts.
inline std::vector<std::map<std::string, double>> compute_tfidf(const Corpus& corpus) {
    if (corpus.documents.empty()) throw std::invalid_argument("compute_tfidf: empty corpus");
    const double n = static_cast<double>(corpus.documents.size());
    std::vector<std::map<std::string, double>> out(corpus.documents.size());
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        std::map<std::string, std::size_t> tf;
        for (const auto& w : corpus.documents[d]) ++tf[w];
        for (const auto& [word, count] : tf) {
            const double idf = std::log(n / static_cast<double>(corpus.document_frequency(word)));
            out[d][word] = static_cast<double>(count) * idf;
        }
    }
    return out;
}

}  // namespace episignal::topics
