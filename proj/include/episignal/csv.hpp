#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace episignal {

// RFC-4180 field splitting for one record. `line` must already contain the
// full record (callers handle quoted embedded newlines via CsvReader).
inline std::vector<std::string> csv_split(std::string_view line, char delim = ',') {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // trailing CR from CRLF files
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string csv_quote(std::string_view field, char delim = ',') {
    bool needs = false;
    for (char c : field) {
        if (c == delim || c == '"' || c == '\n' || c == '\r') {
            needs = true;
            break;
        }
    }
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

// Line-oriented reader over a delimited file with a header row.
class CsvReader {
public:
    CsvReader(const std::string& path, char delim = ',') : in_(path), delim_(delim) {
        if (!in_) throw std::runtime_error("cannot open file: " + path);
        std::string line;
        if (std::getline(in_, line)) header_ = csv_split(line, delim_);
    }

    const std::vector<std::string>& header() const { return header_; }

    int column(std::string_view name) const {
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (header_[i] == name) return static_cast<int>(i);
        }
        return -1;
    }

    int require_column(std::string_view name) const {
        int idx = column(name);
        if (idx < 0) throw std::runtime_error("missing column: " + std::string(name));
        return idx;
    }

    // Reads the next record; joins physical lines while inside quotes.
    bool next(std::vector<std::string>& fields) {
        std::string line;
        if (!std::getline(in_, line)) return false;
        while (count_quotes(line) % 2 == 1) {
            std::string more;
            if (!std::getline(in_, more)) break;
            line += '\n';
            line += more;
        }
        ++line_no_;
        fields = csv_split(line, delim_);
        return true;
    }

    std::size_t line_no() const { return line_no_; }

private:
    static std::size_t count_quotes(std::string_view s) {
        std::size_t n = 0;
        for (char c : s) n += (c == '"');
        return n;
    }

    std::ifstream in_;
    char delim_;
    std::vector<std::string> header_;
    std::size_t line_no_ = 0;  // record number, header excluded
};

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path, char delim = ',')
        : out_(path, std::ios::binary), delim_(delim) {
        if (!out_) throw std::runtime_error("cannot open file for writing: " + path);
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << delim_;
            out_ << csv_quote(fields[i], delim_);
        }
        out_ << '\n';  // LF only
    }

private:
    std::ofstream out_;
    char delim_;
};

// Fixed 9-significant-digit float format shared by every report writer so
// re-runs are byte-comparable.
inline std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    // normalize negative zero
    if (std::string_view(buf) == "-0") return "0";
    return std::string(buf);
}

// Exact round-trip format for stored vectors.
inline std::string format_float_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace episignal
