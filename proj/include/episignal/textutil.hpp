#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace episignal {

// Decodes one UTF-8 codepoint starting at `i`, advancing `i`. Malformed bytes
// decode as U+FFFD and advance by one so scanning always terminates.
inline char32_t utf8_next(std::string_view s, std::size_t& i) {
    const unsigned char c0 = static_cast<unsigned char>(s[i]);
    if (c0 < 0x80) {
        ++i;
        return c0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((c0 & 0xE0) == 0xC0) {
        len = 2;
        cp = c0 & 0x1F;
    } else if ((c0 & 0xF0) == 0xE0) {
        len = 3;
        cp = c0 & 0x0F;
    } else if ((c0 & 0xF8) == 0xF0) {
        len = 4;
        cp = c0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char c = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((c & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

inline void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Fixed-table lowercasing: ASCII plus the Latin-1 Supplement and Latin
// Extended-A ranges. Locale-independent by construction.
inline char32_t lower_cp(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;  // À-Þ except ×
    if (cp >= 0x100 && cp <= 0x137) return (cp | 1);             // alternating pairs
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp | 1);
    if (cp == 0x178) return 0xFF;  // Ÿ -> ÿ
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;  // Greek
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                 // Cyrillic
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

// ASCII base letter(s) for an accented Latin codepoint, empty when the
// codepoint has no folding here.
inline const char* ascii_fold_cp(char32_t cp) {
    switch (cp) {
        case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0xE5:
        case 0x101: case 0x103: case 0x105: return "a";
        case 0xE6: return "ae";
        case 0xE7: case 0x107: case 0x109: case 0x10B: case 0x10D: return "c";
        case 0x10F: case 0x111: return "d";
        case 0xE8: case 0xE9: case 0xEA: case 0xEB:
        case 0x113: case 0x115: case 0x117: case 0x119: case 0x11B: return "e";
        case 0x11D: case 0x11F: case 0x121: case 0x123: return "g";
        case 0x125: case 0x127: return "h";
        case 0xEC: case 0xED: case 0xEE: case 0xEF:
        case 0x129: case 0x12B: case 0x12D: case 0x12F: case 0x131: return "i";
        case 0x135: return "j";
        case 0x137: return "k";
        case 0x13A: case 0x13C: case 0x13E: case 0x140: case 0x142: return "l";
        case 0xF1: case 0x144: case 0x146: case 0x148: return "n";
        case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6: case 0xF8:
        case 0x14D: case 0x14F: case 0x151: return "o";
        case 0x153: return "oe";
        case 0x155: case 0x157: case 0x159: return "r";
        case 0x15B: case 0x15D: case 0x15F: case 0x161: return "s";
        case 0xDF: return "ss";
        case 0x163: case 0x165: case 0x167: return "t";
        case 0xF9: case 0xFA: case 0xFB: case 0xFC:
        case 0x169: case 0x16B: case 0x16D: case 0x16F: case 0x171: case 0x173: return "u";
        case 0x175: return "w";
        case 0xFD: case 0xFF: case 0x177: return "y";
        case 0x17A: case 0x17C: case 0x17E: return "z";
        case 0xF0: return "d";   // ð
        case 0xFE: return "th";  // þ
        default: return "";
    }
}

// Lowercases, preserving accents.
inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) utf8_append(out, lower_cp(utf8_next(s, i)));
    return out;
}

// Lowercases and folds accented Latin letters to ASCII (é->e, ß->ss).
inline std::string fold_ascii(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp = lower_cp(utf8_next(s, i));
        const char* folded = ascii_fold_cp(cp);
        if (*folded) {
            out += folded;
        } else {
            utf8_append(out, cp);
        }
    }
    return out;
}

// Letter test for tokenization: ASCII alpha plus the common European letter
// blocks. Digits, punctuation, symbols and emoji all fail.
inline bool is_word_letter(char32_t cp) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
    if (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) return true;
    if (cp >= 0x370 && cp <= 0x4FF) return true;
    return false;
}

inline std::string_view trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == delim) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace episignal
