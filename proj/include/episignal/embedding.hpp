#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "episignal/csv.hpp"
#include "episignal/textutil.hpp"

namespace episignal::topics {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Sentence-embedding source. Precomputed mode serves vectors from a file
// keyed by tweet id; hashed mode derives a deterministic vector from the
// tokens alone, keeping the pipeline runnable without an external model.
class EmbeddingProvider {
public:
    enum class Mode { precomputed, hashed_ngram };

    static EmbeddingProvider hashed(std::size_t dim) {
        if (dim == 0) throw std::invalid_argument("embedding dim must be positive");
        EmbeddingProvider p;
        p.mode_ = Mode::hashed_ngram;
        p.dim_ = dim;
        return p;
    }

    // File format: first line "dim=<D>", then "tweet_id,v1,...,vD" per line.
    static EmbeddingProvider from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open embedding file: " + path);
        std::string header;
        if (!std::getline(in, header) || header.rfind("dim=", 0) != 0) {
            throw std::runtime_error("embedding file missing dim header: " + path);
        }
        EmbeddingProvider p;
        p.mode_ = Mode::precomputed;
        p.dim_ = static_cast<std::size_t>(std::stoul(header.substr(4)));
        if (p.dim_ == 0) throw std::runtime_error("embedding dim must be positive");
        std::string line;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            auto fields = split(line, ',');
            if (fields.size() != p.dim_ + 1) {
                throw std::runtime_error("embedding line " + std::to_string(line_no) +
                                         " has wrong arity");
            }
            std::vector<double> vec(p.dim_);
            for (std::size_t i = 0; i < p.dim_; ++i) {
                vec[i] = std::stod(fields[i + 1]);
                if (!std::isfinite(vec[i])) {
                    throw std::runtime_error("non-finite embedding value at line " +
                                             std::to_string(line_no));
                }
            }
            p.stored_[fields[0]] = std::move(vec);
        }
        return p;
    }

    Mode mode() const { return mode_; }
    std::size_t dim() const { return dim_; }

    std::vector<double> embed(const std::string& tweet_id,
                              const std::vector<std::string>& tokens) const {
        if (mode_ == Mode::precomputed) {
            auto it = stored_.find(tweet_id);
            if (it == stored_.end()) {
                throw std::runtime_error("no stored embedding for tweet id: " + tweet_id);
            }
            return it->second;
        }
        // mean of hash-bucketed 1- and 2-gram indicators, L2-normalized
        std::vector<double> vec(dim_, 0.0);
        std::size_t grams = 0;
        auto bucket = [&](std::string_view gram) {
            vec[fnv1a(gram) % dim_] += 1.0;
            ++grams;
        };
        for (const auto& t : tokens) bucket(t);
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            bucket(tokens[i] + " " + tokens[i + 1]);
        }
        if (grams == 0) return vec;  // empty input embeds as the zero vector
        for (double& v : vec) v /= static_cast<double>(grams);
        double norm = 0.0;
        for (double v : vec) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& v : vec) v /= norm;
        }
        return vec;
    }

    // Writes vectors for the given ids in order, bit-exact on round-trip.
    static void write_file(const std::string& path, std::size_t dim,
                           const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write embedding file: " + path);
        out << "dim=" << dim << '\n';
        for (const auto& [id, vec] : rows) {
            if (vec.size() != dim) throw std::invalid_argument("embedding row arity mismatch");
            out << id;
            for (double v : vec) out << ',' << format_float_exact(v);
            out << '\n';
        }
    }

private:
    Mode mode_ = Mode::hashed_ngram;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> stored_;
};

}  // namespace episignal::topics
