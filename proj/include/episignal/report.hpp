#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "episignal/corr.hpp"
#include "episignal/csv.hpp"
#include "episignal/date.hpp"
#include "episignal/epi.hpp"

namespace episignal::report {

// Report JSON carries floats at the same fixed 9-significant-digit precision
// as the CSV tables.
inline double report_num(double v) { return std::stod(format_float(v)); }

// One classified, valid topic cluster as the report layer sees it.
struct ClassifiedTopic {
    std::string region;
    Date day;
    std::size_t cluster_id = 0;
    int category = 0;  // 1..7
    std::size_t member_count = 0;
};

struct CategoryRateSeries {
    std::string region;
    std::vector<Date> dates;
    // one entry per date: 7 shares summing to 100, or nullopt on zero-volume days
    std::vector<std::optional<std::array<double, 7>>> shares;
};

// CR(c, d) = 100 * (tweets in valid topics of category c on day d) /
// (tweets in all valid topics on day d).
inline CategoryRateSeries category_rate(const std::vector<ClassifiedTopic>& topics,
                                        const std::string& region, DateInterval window) {
    CategoryRateSeries out;
    out.region = region;
    for (Date d = window.begin; d < window.end; ++d) {
        std::array<double, 7> counts{};
        double total = 0.0;
        for (const auto& t : topics) {
            if (t.region != region || t.day != d) continue;
            counts[static_cast<std::size_t>(t.category - 1)] +=
                static_cast<double>(t.member_count);
            total += static_cast<double>(t.member_count);
        }
        out.dates.push_back(d);
        if (total == 0.0) {
            out.shares.push_back(std::nullopt);
        } else {
            std::array<double, 7> shares{};
            for (std::size_t c = 0; c < 7; ++c) shares[c] = 100.0 * counts[c] / total;
            out.shares.push_back(shares);
        }
    }
    return out;
}

inline void write_cr_heatmap(const std::vector<CategoryRateSeries>& series,
                             const std::string& path) {
    CsvWriter w(path);
    std::vector<std::string> header{"region", "date"};
    for (int c = 1; c <= 7; ++c) header.push_back("cr_" + std::to_string(c));
    w.row(header);
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.dates.size(); ++i) {
            std::vector<std::string> row{s.region, s.dates[i].to_iso()};
            if (s.shares[i]) {
                for (double v : *s.shares[i]) row.push_back(format_float(v));
            } else {
                for (int c = 0; c < 7; ++c) row.push_back("");  // zero-volume day
            }
            w.row(row);
        }
    }
}

// Table of valid-topic counts per category and region, with totals. An empty
// classified set produces just the header.
inline void write_topic_counts(const std::vector<ClassifiedTopic>& topics,
                               const std::vector<std::string>& regions,
                               const std::string& path) {
    CsvWriter w(path);
    std::vector<std::string> header{"category"};
    header.insert(header.end(), regions.begin(), regions.end());
    header.push_back("total");
    w.row(header);
    if (topics.empty()) return;
    std::map<std::string, std::array<long long, 7>> counts;
    for (const auto& r : regions) counts[r] = {};
    for (const auto& t : topics) {
        auto it = counts.find(t.region);
        if (it != counts.end()) ++it->second[static_cast<std::size_t>(t.category - 1)];
    }
    std::array<long long, 7> row_total{};
    std::map<std::string, long long> col_total;
    for (int c = 0; c < 7; ++c) {
        std::vector<std::string> row{std::to_string(c + 1)};
        long long total = 0;
        for (const auto& r : regions) {
            const long long v = counts[r][static_cast<std::size_t>(c)];
            row.push_back(std::to_string(v));
            total += v;
            col_total[r] += v;
        }
        row.push_back(std::to_string(total));
        row_total[static_cast<std::size_t>(c)] = total;
        w.row(row);
    }
    std::vector<std::string> totals{"total"};
    long long grand = 0;
    for (const auto& r : regions) {
        totals.push_back(std::to_string(col_total[r]));
        grand += col_total[r];
    }
    totals.push_back(std::to_string(grand));
    w.row(totals);
}

// Ranked word-frequency table, the tabular stand-in for a word cloud.
inline void write_wordfreq(const std::map<std::string, std::size_t>& counts,
                           const std::string& path, std::size_t max_rows = 100) {
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > max_rows) ranked.resize(max_rows);
    CsvWriter w(path);
    w.row({"rank", "word", "count"});
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        w.row({std::to_string(i + 1), ranked[i].first, std::to_string(ranked[i].second)});
    }
}

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

}  // namespace detail

// Dual-axis line plot on a fixed 960x480 canvas: tweet volume on the left
// axis, daily cases on the right, pandemic periods as shaded bands.
inline void write_volume_vs_cases_svg(const std::string& region,
                                      const corr::DailySeries& volume,
                                      const corr::DailySeries& cases,
                                      const epi::PandemicPeriods* periods,
                                      const std::string& path) {
    const double width = 960.0, height = 480.0;
    const double left = 60.0, right = 900.0, top = 40.0, bottom = 430.0;
    if (volume.empty() || cases.empty()) throw std::invalid_argument("empty plot series");
    const Date d0 = std::min(volume.begin()->first, cases.begin()->first);
    const Date d1 = std::max(volume.rbegin()->first, cases.rbegin()->first);
    const double days = std::max(1, d1 - d0);
    double vmax = 1.0, cmax = 1.0;
    for (const auto& [d, v] : volume) vmax = std::max(vmax, v);
    for (const auto& [d, v] : cases) cmax = std::max(cmax, v);
    auto x_of = [&](Date d) { return left + (right - left) * (d - d0) / days; };
    auto y_left = [&](double v) { return bottom - (bottom - top) * v / vmax; };
    auto y_right = [&](double v) { return bottom - (bottom - top) * v / cmax; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 960 480\">\n";
    out << "<rect width=\"960\" height=\"480\" fill=\"white\"/>\n";

    if (periods) {
        const struct {
            const DateInterval& iv;
            const char* color;
            const char* name;
        } bands[] = {
            {periods->pre_peak, "#fde6c4", "pre-peak"},
            {periods->free_contagious, "#f9c8c4", "free-contagious"},
            {periods->measures, "#c9d8f0", "measures"},
            {periods->decay, "#cfe8cf", "decay"},
        };
        for (const auto& band : bands) {
            if (band.iv.empty()) continue;
            const Date b = std::max(band.iv.begin, d0);
            const Date e = std::min(band.iv.end, d1 + 1);
            if (e <= b) continue;
            out << "<rect x=\"" << detail::svg_num(x_of(b)) << "\" y=\"" << top << "\" width=\""
                << detail::svg_num(x_of(e) - x_of(b)) << "\" height=\""
                << detail::svg_num(bottom - top) << "\" fill=\"" << band.color
                << "\" opacity=\"0.7\"><title>" << band.name << "</title></rect>\n";
        }
    }

    auto polyline = [&](const corr::DailySeries& s, auto y_of, const char* color) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& [d, v] : s) {
            if (!first) out << ' ';
            out << detail::svg_num(x_of(d)) << ',' << detail::svg_num(y_of(v));
            first = false;
        }
        out << "\"/>\n";
    };
    polyline(volume, y_left, "#1f6fb2");
    polyline(cases, y_right, "#c23b22");

    out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << right << "\" y1=\"" << top << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    out << "<text x=\"60\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << region
        << ": daily tweet volume (left, blue) vs new cases (right, red)</text>\n";
    out << "<text x=\"8\" y=\"" << detail::svg_num(top + 10) << "\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << format_float(vmax) << "</text>\n";
    out << "<text x=\"908\" y=\"" << detail::svg_num(top + 10) << "\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << format_float(cmax) << "</text>\n";
    out << "<text x=\"" << left << "\" y=\"452\" font-family=\"sans-serif\" font-size=\"11\">"
        << d0.to_iso() << "</text>\n";
    out << "<text x=\"" << detail::svg_num(right - 70) << "\" y=\"452\""
        << " font-family=\"sans-serif\" font-size=\"11\">" << d1.to_iso() << "</text>\n";
    out << "</svg>\n";
}

}  // namespace episignal::report
