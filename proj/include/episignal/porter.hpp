#pragma once

#include <string>
#include <string_view>

namespace episignal {

// Porter stemming algorithm (the 1980 definition). Tokens containing anything
// outside a-z pass through unchanged, which leaves non-English words alone.
class PorterStemmer {
public:
    static std::string stem(std::string_view token) {
        for (char c : token) {
            if (c < 'a' || c > 'z') return std::string(token);
        }
        if (token.size() <= 2) return std::string(token);
        std::string w(token);
        step1a(w);
        step1b(w);
        step1c(w);
        step2(w);
        step3(w);
        step4(w);
        step5(w);
        return w;
    }

private:
    static bool is_consonant(const std::string& w, std::size_t i) {
        switch (w[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !is_consonant(w, i - 1);
            default:
                return true;
        }
    }

    // The measure m of w[0..len): number of VC sequences in [C](VC)^m[V].
    static int measure(const std::string& w, std::size_t len) {
        int m = 0;
        std::size_t i = 0;
        while (i < len && is_consonant(w, i)) ++i;
        while (i < len) {
            while (i < len && !is_consonant(w, i)) ++i;
            if (i == len) break;
            ++m;
            while (i < len && is_consonant(w, i)) ++i;
        }
        return m;
    }

    static bool has_vowel(const std::string& w, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            if (!is_consonant(w, i)) return true;
        }
        return false;
    }

    static bool double_consonant(const std::string& w, std::size_t len) {
        if (len < 2) return false;
        return w[len - 1] == w[len - 2] && is_consonant(w, len - 1);
    }

    // consonant-vowel-consonant ending where the final consonant is not w/x/y
    static bool cvc(const std::string& w, std::size_t len) {
        if (len < 3) return false;
        if (!is_consonant(w, len - 3) || is_consonant(w, len - 2) || !is_consonant(w, len - 1)) {
            return false;
        }
        const char c = w[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    static bool ends(const std::string& w, std::string_view suffix) {
        return w.size() >= suffix.size() &&
               std::string_view(w).substr(w.size() - suffix.size()) == suffix;
    }

    static std::size_t stem_len(const std::string& w, std::string_view suffix) {
        return w.size() - suffix.size();
    }

    // replace suffix when the measure of the remaining stem exceeds threshold
    static bool replace_if(std::string& w, std::string_view suffix, std::string_view repl,
                           int min_m) {
        if (!ends(w, suffix)) return false;
        const std::size_t len = stem_len(w, suffix);
        if (measure(w, len) > min_m) {
            w.resize(len);
            w += repl;
        }
        return true;  // suffix matched, stop scanning alternatives
    }

    static void step1a(std::string& w) {
        if (ends(w, "sses")) {
            w.resize(w.size() - 2);
        } else if (ends(w, "ies")) {
            w.resize(w.size() - 2);
        } else if (!ends(w, "ss") && ends(w, "s")) {
            w.resize(w.size() - 1);
        }
    }

    static void step1b(std::string& w) {
        if (ends(w, "eed")) {
            if (measure(w, stem_len(w, "eed")) > 0) w.resize(w.size() - 1);
            return;
        }
        bool stripped = false;
        if (ends(w, "ed") && has_vowel(w, stem_len(w, "ed"))) {
            w.resize(w.size() - 2);
            stripped = true;
        } else if (ends(w, "ing") && has_vowel(w, stem_len(w, "ing"))) {
            w.resize(w.size() - 3);
            stripped = true;
        }
        if (!stripped) return;
        if (ends(w, "at") || ends(w, "bl") || ends(w, "iz")) {
            w += 'e';
        } else if (double_consonant(w, w.size())) {
            const char c = w.back();
            if (c != 'l' && c != 's' && c != 'z') w.resize(w.size() - 1);
        } else if (measure(w, w.size()) == 1 && cvc(w, w.size())) {
            w += 'e';
        }
    }

    static void step1c(std::string& w) {
        if (ends(w, "y") && has_vowel(w, w.size() - 1)) w.back() = 'i';
    }

    static void step2(std::string& w) {
        static constexpr std::pair<std::string_view, std::string_view> rules[] = {
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}};
        for (const auto& [suffix, repl] : rules) {
            if (replace_if(w, suffix, repl, 0)) return;
        }
    }

    static void step3(std::string& w) {
        static constexpr std::pair<std::string_view, std::string_view> rules[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""}};
        for (const auto& [suffix, repl] : rules) {
            if (replace_if(w, suffix, repl, 0)) return;
        }
    }

    static void step4(std::string& w) {
        static constexpr std::string_view plain[] = {"al",   "ance", "ence", "er",  "ic",
                                                     "able", "ible", "ant",  "ement", "ment",
                                                     "ent"};
        for (auto suffix : plain) {
            if (ends(w, suffix)) {
                if (measure(w, stem_len(w, suffix)) > 1) w.resize(stem_len(w, suffix));
                return;
            }
        }
        if (ends(w, "ion")) {
            const std::size_t len = stem_len(w, "ion");
            if (len > 0 && (w[len - 1] == 's' || w[len - 1] == 't') && measure(w, len) > 1) {
                w.resize(len);
            }
            return;
        }
        static constexpr std::string_view tail[] = {"ou",  "ism", "ate", "iti",
                                                    "ous", "ive", "ize"};
        for (auto suffix : tail) {
            if (ends(w, suffix)) {
                if (measure(w, stem_len(w, suffix)) > 1) w.resize(stem_len(w, suffix));
                return;
            }
        }
    }

    static void step5(std::string& w) {
        if (ends(w, "e")) {
            const std::size_t len = w.size() - 1;
            const int m = measure(w, len);
            if (m > 1 || (m == 1 && !cvc(w, len))) w.resize(len);
        }
        if (w.size() > 1 && w.back() == 'l' && double_consonant(w, w.size()) &&
            measure(w, w.size()) > 1) {
            w.resize(w.size() - 1);
        }
    }
};

}  // namespace episignal
