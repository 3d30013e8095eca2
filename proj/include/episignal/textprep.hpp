#pragma once

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "episignal/csv.hpp"
#include "episignal/porter.hpp"
#include "episignal/textutil.hpp"

namespace episignal::textprep {

// Symmetric-delete dictionary for edit-distance-1 correction. Candidates are
// gathered from the shared-deletion index and verified with a direct distance
// check; the highest-frequency candidate wins, ties lexicographic.
class SpellDictionary {
public:
    SpellDictionary() = default;

    void add(const std::string& word, long long frequency) {
        words_[word] = frequency;
        for (const auto& del : deletes1(word)) delete_index_[del].push_back(word);
    }

    static SpellDictionary load(const std::string& path) {
        CsvReader reader(path, '\t');
        const int c_word = reader.require_column("word");
        const int c_freq = reader.require_column("frequency");
        SpellDictionary dict;
        std::vector<std::string> f;
        while (reader.next(f)) {
            if (f.size() < 2) continue;
            dict.add(f[static_cast<std::size_t>(c_word)],
                     std::stoll(f[static_cast<std::size_t>(c_freq)]));
        }
        return dict;
    }

    bool empty() const { return words_.empty(); }

    std::string correct(const std::string& word) const {
        if (words_.count(word)) return word;
        std::set<std::string> candidates;
        auto consider = [&](const std::string& w) {
            if (words_.count(w) && within_one_edit(word, w)) candidates.insert(w);
        };
        for (const auto& del : deletes1(word)) {
            consider(del);
            auto it = delete_index_.find(del);
            if (it != delete_index_.end()) {
                for (const auto& w : it->second) consider(w);
            }
        }
        auto it = delete_index_.find(word);
        if (it != delete_index_.end()) {
            for (const auto& w : it->second) consider(w);
        }
        if (candidates.empty()) return word;
        std::string best;
        long long best_freq = -1;
        for (const auto& c : candidates) {  // set order makes ties lexicographic
            const long long freq = words_.at(c);
            if (freq > best_freq) {
                best = c;
                best_freq = freq;
            }
        }
        return best;
    }

private:
    static std::vector<std::string> deletes1(const std::string& word) {
        std::vector<std::string> out;
        // operate on codepoint boundaries so multibyte letters delete whole
        std::vector<std::size_t> starts;
        std::size_t i = 0;
        while (i < word.size()) {
            starts.push_back(i);
            utf8_next(word, i);
        }
        starts.push_back(word.size());
        for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
            std::string d = word.substr(0, starts[k]) + word.substr(starts[k + 1]);
            out.push_back(std::move(d));
        }
        return out;
    }

    static bool within_one_edit(const std::string& a, const std::string& b) {
        if (a == b) return true;
        const auto la = static_cast<long long>(a.size());
        const auto lb = static_cast<long long>(b.size());
        if (std::abs(la - lb) > 1) return false;
        // byte-level scan suffices: a one-codepoint edit differing in byte
        // length beyond 1 only happens across multibyte boundaries, which the
        // delete index never proposes for dictionary words
        const std::string& s = la <= lb ? a : b;
        const std::string& l = la <= lb ? b : a;
        std::size_t i = 0, j = 0;
        bool edited = false;
        while (i < s.size() && j < l.size()) {
            if (s[i] == l[j]) {
                ++i;
                ++j;
                continue;
            }
            if (edited) return false;
            edited = true;
            if (s.size() == l.size()) {
                ++i;
                ++j;
            } else {
                ++j;
            }
        }
        return true;
    }

    std::unordered_map<std::string, long long> words_;
    std::unordered_map<std::string, std::vector<std::string>> delete_index_;
};

struct PreprocessConfig {
    std::map<std::string, std::set<std::string>> stopword_lists;  // language -> words
    std::set<std::string> query_keywords = {"coronavirus", "koronavirus", "corona",
                                            "covid-19", "covid"};
    bool spell_correct = false;
    SpellDictionary dictionary;
    bool pos_filter = false;
    std::map<std::string, std::string> pos_lexicon;  // word -> tag
    bool stem = false;
};

struct TokenizedTweet {
    std::string tweet_id;
    std::vector<std::string> tokens;
};

inline std::set<std::string> load_stopword_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty()) out.insert(to_lower(t));
    }
    return out;
}

inline std::map<std::string, std::string> load_pos_lexicon(const std::string& path) {
    CsvReader reader(path, '\t');
    const int c_word = reader.require_column("word");
    const int c_tag = reader.require_column("tag");
    std::map<std::string, std::string> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() < 2) continue;
        out[f[static_cast<std::size_t>(c_word)]] = to_lower(f[static_cast<std::size_t>(c_tag)]);
    }
    return out;
}

namespace detail {

inline bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Removes scheme://... and www.-prefixed spans up to the next whitespace.
inline std::string strip_urls(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        bool url = false;
        if (s.compare(i, 4, "www.") == 0 &&
            (i == 0 || is_space_byte(s[i - 1]) || !std::isalnum(static_cast<unsigned char>(s[i - 1])))) {
            url = true;
        } else if (std::isalpha(static_cast<unsigned char>(s[i]))) {
            std::size_t j = i;
            while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
            if (s.compare(j, 3, "://") == 0) url = true;
        }
        if (url) {
            while (i < s.size() && !is_space_byte(s[i])) ++i;
            out.push_back(' ');
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    return out;
}

// Removes @handle spans and a leading "rt" marker.
inline std::string strip_mentions_and_rt(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '@') {
            std::size_t j = i + 1;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
                ++j;
            }
            if (j > i + 1) {
                i = j;
                out.push_back(' ');
                continue;
            }
        }
        out.push_back(s[i]);
        ++i;
    }
    // leading "rt " marker (input is already lowercased)
    std::size_t b = 0;
    while (b < out.size() && is_space_byte(out[b])) ++b;
    if (out.compare(b, 2, "rt") == 0 &&
        (b + 2 == out.size() || !std::isalnum(static_cast<unsigned char>(out[b + 2])))) {
        out.erase(b, 2);
    }
    return out;
}

// Every non-letter codepoint becomes a separator, which drops punctuation and
// digits in one pass.
inline std::string strip_punct_digits(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t before = i;
        char32_t cp = utf8_next(s, i);
        if (is_word_letter(cp)) {
            out.append(s, before, i - before);
        } else {
            out.push_back(' ');
        }
    }
    return out;
}

}  // namespace detail

// The preprocessing pipeline, stages in fixed order: lowercase, URL strip,
// mention/RT strip, punctuation+digit strip, optional spell correction,
// tokenization, stopword removal, query-keyword removal, optional POS filter,
// optional stemming.
inline std::vector<std::string> preprocess(const std::string& text,
                                           const PreprocessConfig& config) {
    std::string s = to_lower(text);
    s = detail::strip_urls(s);
    s = detail::strip_mentions_and_rt(s);
    s = detail::strip_punct_digits(s);

    std::vector<std::string> words;
    for (auto& w : split(s, ' ')) {
        if (!w.empty()) words.push_back(std::move(w));
    }
    if (config.spell_correct && !config.dictionary.empty()) {
        for (auto& w : words) w = config.dictionary.correct(w);
    }

    std::vector<std::string> tokens;
    tokens.reserve(words.size());
    for (auto& w : words) {
        if (w == "rt") continue;
        bool stop = false;
        for (const auto& [lang, list] : config.stopword_lists) {
            (void)lang;
            if (list.count(w)) {
                stop = true;
                break;
            }
        }
        if (stop || config.query_keywords.count(w)) continue;
        if (config.pos_filter) {
            auto it = config.pos_lexicon.find(w);
            if (it != config.pos_lexicon.end()) {
                const std::string& tag = it->second;
                if (tag != "noun" && tag != "verb" && tag != "adj" && tag != "adv") continue;
            }
        }
        tokens.push_back(std::move(w));
    }
    if (config.stem) {
        for (auto& t : tokens) t = PorterStemmer::stem(t);
    }
    return tokens;
}

}  // namespace episignal::textprep
