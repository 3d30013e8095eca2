#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "episignal/csv.hpp"
#include "episignal/date.hpp"
#include "episignal/textutil.hpp"

namespace episignal::ingest {

// Ordered location components, finest to coarsest ("Moselle, Lorraine, France").
using LocationPath = std::vector<std::string>;

inline LocationPath parse_location_path(std::string_view s) {
    LocationPath path;
    for (auto& part : split(s, ',')) {
        auto t = trim(part);
        if (!t.empty()) path.emplace_back(t);
    }
    return path;
}

inline std::string location_path_to_string(const LocationPath& p) { return join(p, ", "); }

// `member` matches when it equals the trailing (coarsest) components of `path`:
// [Lorraine, France] covers [Moselle, Lorraine, France].
inline bool path_has_suffix(const LocationPath& path, const LocationPath& member) {
    if (member.empty() || member.size() > path.size()) return false;
    return std::equal(member.rbegin(), member.rend(), path.rbegin());
}

struct TweetRecord {
    std::string tweet_id;
    std::string full_text;
    std::string user_id;
    std::optional<std::string> user_geo_original;
    std::optional<LocationPath> user_geo;
    Date date;
};

struct GazetteerEntry {
    std::string pattern;  // lowercase, diacritic-folded, trimmed
    LocationPath canonical;
    int priority = 0;
};

struct RegionSpec {
    std::string name;
    std::vector<LocationPath> members;
};

struct CaseRecord {
    Date date;
    LocationPath region;
    long long new_cases = 0;  // raw, may be negative
    long long deaths = 0;
};

// Contiguous daily series; `values` are real so smoothed series reuse the type.
struct CaseSeries {
    std::string region;
    Date start;
    std::vector<double> values;
    std::vector<Date> clamped_days;    // days where a negative raw value was clamped to 0
    std::vector<Date> zero_fill_days;  // days a member was suppressed by a zero-fill cutoff

    Date date_at(std::size_t i) const { return start + static_cast<int>(i); }
    std::size_t size() const { return values.size(); }
    Date end() const { return start + static_cast<int>(values.size()); }  // exclusive
};

struct LoadResult {
    std::vector<TweetRecord> records;
    std::size_t skipped = 0;
};

namespace detail {

inline std::optional<TweetRecord> tweet_from_json(const nlohmann::json& j) {
    if (!j.is_object()) return std::nullopt;
    TweetRecord rec;
    auto get_str = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) return std::nullopt;
        return it->get<std::string>();
    };
    auto id = get_str("tweet_id");
    auto text = get_str("full_text");
    auto user = get_str("user_id");
    auto date_s = get_str("date");
    if (!id || id->empty() || !text || !user || !date_s) return std::nullopt;
    auto date = Date::parse(*date_s);
    if (!date) return std::nullopt;
    rec.tweet_id = *id;
    rec.full_text = *text;
    rec.user_id = *user;
    rec.date = *date;
    if (auto geo_orig = get_str("user_geo_original"); geo_orig && !geo_orig->empty()) {
        rec.user_geo_original = *geo_orig;
    }
    if (auto geo = get_str("user_geo"); geo && !geo->empty()) {
        rec.user_geo = parse_location_path(*geo);
    }
    return rec;
}

}  // namespace detail

enum class TweetFormat { jsonl, csv };

// Loads tweet records in file order. Malformed lines are skipped and counted,
// or abort with the line number when strict.
inline LoadResult load_tweets(const std::string& path, TweetFormat format, bool strict) {
    LoadResult out;
    auto fail_or_skip = [&](std::size_t line_no) {
        if (strict) {
            throw std::runtime_error("malformed record at " + path + ":" +
                                     std::to_string(line_no));
        }
        ++out.skipped;
    };
    std::set<std::string> seen_ids;
    auto push = [&](TweetRecord&& rec, std::size_t line_no) {
        if (!seen_ids.insert(rec.tweet_id).second) {
            fail_or_skip(line_no);  // duplicate id
            return;
        }
        out.records.push_back(std::move(rec));
    };
    if (format == TweetFormat::jsonl) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open file: " + path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                fail_or_skip(line_no);
                continue;
            }
            if (auto rec = detail::tweet_from_json(j)) {
                push(std::move(*rec), line_no);
            } else {
                fail_or_skip(line_no);
            }
        }
    } else {
        CsvReader reader(path);
        const int c_id = reader.require_column("tweet_id");
        const int c_text = reader.require_column("full_text");
        const int c_user = reader.require_column("user_id");
        const int c_geo_orig = reader.column("user_geo_original");
        const int c_geo = reader.column("user_geo");
        const int c_date = reader.require_column("date");
        std::vector<std::string> f;
        while (reader.next(f)) {
            const std::size_t line_no = reader.line_no() + 1;  // header offset
            const std::size_t needed = static_cast<std::size_t>(
                std::max({c_id, c_text, c_user, c_date, c_geo_orig, c_geo})) + 1;
            if (f.size() < needed || f[static_cast<std::size_t>(c_id)].empty()) {
                fail_or_skip(line_no);
                continue;
            }
            auto date = Date::parse(f[static_cast<std::size_t>(c_date)]);
            if (!date) {
                fail_or_skip(line_no);
                continue;
            }
            TweetRecord rec;
            rec.tweet_id = f[static_cast<std::size_t>(c_id)];
            rec.full_text = f[static_cast<std::size_t>(c_text)];
            rec.user_id = f[static_cast<std::size_t>(c_user)];
            rec.date = *date;
            if (c_geo_orig >= 0 && !f[static_cast<std::size_t>(c_geo_orig)].empty()) {
                rec.user_geo_original = f[static_cast<std::size_t>(c_geo_orig)];
            }
            if (c_geo >= 0 && !f[static_cast<std::size_t>(c_geo)].empty()) {
                rec.user_geo = parse_location_path(f[static_cast<std::size_t>(c_geo)]);
            }
            push(std::move(rec), line_no);
        }
    }
    return out;
}

// Shared canonical form for gazetteer patterns and raw location strings:
// folded to lowercase ASCII, punctuation and digits dropped, commas kept as
// token separators, whitespace squeezed.
inline std::string location_match_key(std::string_view raw) {
    std::string folded = fold_ascii(raw);
    std::string cleaned;
    cleaned.reserve(folded.size());
    std::size_t i = 0;
    while (i < folded.size()) {
        std::size_t before = i;
        char32_t cp = utf8_next(folded, i);
        if (is_word_letter(cp) || cp == ',') {
            cleaned.append(folded, before, i - before);
        } else {
            cleaned.push_back(' ');
        }
    }
    std::string out;
    bool prev_space = false;
    for (char c : std::string(trim(cleaned))) {
        if (c == ' ') {
            if (!prev_space) out.push_back(' ');
            prev_space = true;
        } else {
            out.push_back(c);
            prev_space = false;
        }
    }
    return out;
}

// Gazetteer TSV: pattern, canonical, priority.
inline std::vector<GazetteerEntry> load_gazetteer(const std::string& path) {
    CsvReader reader(path, '\t');
    const int c_pattern = reader.require_column("pattern");
    const int c_canonical = reader.require_column("canonical");
    const int c_priority = reader.require_column("priority");
    std::vector<GazetteerEntry> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() < 3) continue;
        GazetteerEntry e;
        e.pattern = location_match_key(f[static_cast<std::size_t>(c_pattern)]);
        e.canonical = parse_location_path(f[static_cast<std::size_t>(c_canonical)]);
        e.priority = std::stoi(f[static_cast<std::size_t>(c_priority)]);
        if (e.pattern.empty() || e.canonical.empty()) {
            throw std::runtime_error("invalid gazetteer entry at record " +
                                     std::to_string(reader.line_no()));
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<RegionSpec> load_region_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<RegionSpec> out;
    for (const auto& item : j.at("regions")) {
        RegionSpec spec;
        spec.name = item.at("name").get<std::string>();
        for (const auto& m : item.at("members")) {
            spec.members.push_back(parse_location_path(m.get<std::string>()));
        }
        if (spec.members.empty()) {
            throw std::runtime_error("region spec with no members: " + spec.name);
        }
        for (std::size_t a = 0; a < spec.members.size(); ++a) {
            for (std::size_t b = 0; b < spec.members.size(); ++b) {
                if (a != b && path_has_suffix(spec.members[a], spec.members[b])) {
                    throw std::runtime_error("region spec " + spec.name +
                                             ": member covers another member");
                }
            }
        }
        out.push_back(std::move(spec));
    }
    return out;
}

// Cases CSV: date,region,new_cases,deaths.
inline std::vector<CaseRecord> load_cases(const std::string& path) {
    CsvReader reader(path);
    const int c_date = reader.require_column("date");
    const int c_region = reader.require_column("region");
    const int c_cases = reader.require_column("new_cases");
    const int c_deaths = reader.require_column("deaths");
    std::vector<CaseRecord> out;
    std::map<std::pair<std::int32_t, std::string>, bool> seen;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() < 4) {
            throw std::runtime_error("short case record at record " +
                                     std::to_string(reader.line_no()));
        }
        CaseRecord rec;
        auto date = Date::parse(f[static_cast<std::size_t>(c_date)]);
        if (!date) {
            throw std::runtime_error("bad date in case record " + std::to_string(reader.line_no()));
        }
        rec.date = *date;
        rec.region = parse_location_path(f[static_cast<std::size_t>(c_region)]);
        rec.new_cases = std::stoll(f[static_cast<std::size_t>(c_cases)]);
        rec.deaths = std::stoll(f[static_cast<std::size_t>(c_deaths)]);
        if (rec.deaths < 0) {
            throw std::runtime_error("negative deaths in case record " +
                                     std::to_string(reader.line_no()));
        }
        auto key = std::make_pair(rec.date.days, location_path_to_string(rec.region));
        if (seen.count(key)) {
            throw std::runtime_error("duplicate (date, region) case record at record " +
                                     std::to_string(reader.line_no()));
        }
        seen[key] = true;
        out.push_back(std::move(rec));
    }
    return out;
}

// Canonicalizes a free-text location. The raw string is folded and the longest
// matching pattern wins, comparing against the whole string and each
// comma-separated token. Ties go to higher priority, then lexicographically
// smaller canonical path. No match yields nullopt.
inline std::optional<LocationPath> normalize_location(std::string_view raw,
                                                      const std::vector<GazetteerEntry>& gazetteer) {
    const std::string whole = location_match_key(raw);
    if (whole.empty()) return std::nullopt;
    std::vector<std::string> candidates{whole};
    for (auto& tok : split(whole, ',')) {
        std::string t(trim(tok));
        if (!t.empty() && t != whole) candidates.push_back(std::move(t));
    }
    const GazetteerEntry* best = nullptr;
    for (const auto& entry : gazetteer) {
        bool hit = false;
        for (const auto& cand : candidates) {
            if (cand == entry.pattern) {
                hit = true;
                break;
            }
        }
        if (!hit) continue;
        if (!best || entry.pattern.size() > best->pattern.size() ||
            (entry.pattern.size() == best->pattern.size() &&
             (entry.priority > best->priority ||
              (entry.priority == best->priority &&
               location_path_to_string(entry.canonical) <
                   location_path_to_string(best->canonical))))) {
            best = &entry;
        }
    }
    if (!best) return std::nullopt;
    return best->canonical;
}

// All regions whose member list covers the record's canonical location.
inline std::vector<std::string> assign_region(const TweetRecord& record,
                                              const std::vector<RegionSpec>& specs) {
    std::vector<std::string> out;
    if (!record.user_geo) return out;
    for (const auto& spec : specs) {
        for (const auto& member : spec.members) {
            if (path_has_suffix(*record.user_geo, member)) {
                out.push_back(spec.name);
                break;
            }
        }
    }
    return out;
}

// Sums member series day by day. A zero-fill cutoff keyed by a member path
// suppresses matching records dated before the cutoff (the key matches the
// record's region by suffix, so a subregion's data gap applies to every
// composite that consumes it); negative raw values clamp to 0 and the day is
// flagged.
inline CaseSeries aggregate_region_cases(
    const std::vector<CaseRecord>& records, const RegionSpec& spec,
    const std::map<std::string, Date>& zero_fill_before = {}) {
    Date min_date{0}, max_date{0};
    bool any = false;
    std::vector<const CaseRecord*> matched;
    for (const auto& rec : records) {
        for (const auto& member : spec.members) {
            if (path_has_suffix(rec.region, member)) {
                matched.push_back(&rec);
                if (!any || rec.date < min_date) min_date = rec.date;
                if (!any || rec.date > max_date) max_date = rec.date;
                any = true;
                break;
            }
        }
    }
    if (!any) throw std::runtime_error("no case records match region spec: " + spec.name);
    CaseSeries series;
    series.region = spec.name;
    series.start = min_date;
    series.values.assign(static_cast<std::size_t>(max_date - min_date) + 1, 0.0);
    std::set<std::int32_t> clamped, zero_filled;
    for (std::size_t i = 0; i < matched.size(); ++i) {
        const CaseRecord& rec = *matched[i];
        bool suppressed = false;
        for (const auto& [key, cutoff] : zero_fill_before) {
            if (rec.date < cutoff && path_has_suffix(rec.region, parse_location_path(key))) {
                suppressed = true;
                break;
            }
        }
        if (suppressed) {
            if (rec.new_cases != 0) zero_filled.insert(rec.date.days);
            continue;
        }
        long long v = rec.new_cases;
        if (v < 0) {
            clamped.insert(rec.date.days);
            v = 0;
        }
        series.values[static_cast<std::size_t>(rec.date - min_date)] += static_cast<double>(v);
    }
    for (auto d : clamped) series.clamped_days.push_back(Date{d});
    for (auto d : zero_filled) series.zero_fill_days.push_back(Date{d});
    return series;
}

// Tweets per day for one region over [window.begin, window.end); missing days
// count 0.
inline std::map<Date, long long> daily_volume(const std::vector<TweetRecord>& tweets,
                                              const RegionSpec& spec, DateInterval window) {
    std::map<Date, long long> out;
    for (Date d = window.begin; d < window.end; ++d) out[d] = 0;
    for (const auto& tweet : tweets) {
        if (!window.contains(tweet.date) || !tweet.user_geo) continue;
        for (const auto& member : spec.members) {
            if (path_has_suffix(*tweet.user_geo, member)) {
                ++out[tweet.date];
                break;
            }
        }
    }
    return out;
}

}  // namespace episignal::ingest
