#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "episignal/ingest.hpp"
#include "episignal/rng.hpp"

using namespace episignal;
using namespace episignal::ingest;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::vector<GazetteerEntry> fixture_gazetteer() {
    return load_gazetteer(std::string(EPISIGNAL_FIXTURE_DIR) + "/gazetteer.tsv");
}

std::vector<RegionSpec> fixture_regions() {
    return load_region_specs(std::string(EPISIGNAL_FIXTURE_DIR) + "/regions.json");
}

}  // namespace

TEST_CASE("load_tweets: jsonl happy path") {
    TempFile f("tw1.jsonl", R"({"tweet_id":"1","full_text":"hello","user_id":"u1","user_geo_original":"Moselle","user_geo":"Moselle, Lorraine, France","date":"2020-03-01"}
{"tweet_id":"2","full_text":"second","user_id":"u2","date":"2020-03-02"}
)");
    auto res = load_tweets(f.path, TweetFormat::jsonl, true);
    REQUIRE(res.records.size() == 2);
    CHECK(res.skipped == 0);
    CHECK(res.records[0].tweet_id == "1");
    CHECK(res.records[0].user_geo_original.value() == "Moselle");
    REQUIRE(res.records[0].user_geo);
    CHECK(location_path_to_string(*res.records[0].user_geo) == "Moselle, Lorraine, France");
    CHECK(res.records[1].user_geo_original == std::nullopt);
    CHECK(res.records[1].date.to_iso() == "2020-03-02");
}

TEST_CASE("load_tweets: empty file") {
    TempFile f("tw2.jsonl", "");
    auto res = load_tweets(f.path, TweetFormat::jsonl, false);
    CHECK(res.records.empty());
    CHECK(res.skipped == 0);
}

TEST_CASE("load_tweets: malformed middle line") {
    const std::string content =
        R"({"tweet_id":"1","full_text":"a","user_id":"u","date":"2020-03-01"})" "\n"
        R"({"tweet_id":"2","full_te)" "\n"
        R"({"tweet_id":"3","full_text":"c","user_id":"u","date":"2020-03-03"})" "\n";
    TempFile f("tw3.jsonl", content);
    auto lax = load_tweets(f.path, TweetFormat::jsonl, false);
    CHECK(lax.records.size() == 2);
    CHECK(lax.skipped == 1);
    CHECK(lax.records[0].tweet_id == "1");
    CHECK(lax.records[1].tweet_id == "3");
    CHECK_THROWS_WITH(load_tweets(f.path, TweetFormat::jsonl, true),
                      Catch::Matchers::ContainsSubstring(":2"));
}

TEST_CASE("load_tweets: csv format and duplicate ids") {
    TempFile f("tw4.csv",
               "tweet_id,full_text,user_id,user_geo_original,user_geo,date\n"
               "1,\"text, with comma\",u1,Metz,,2020-03-01\n"
               "1,dup,u2,,,2020-03-02\n");
    auto res = load_tweets(f.path, TweetFormat::csv, false);
    CHECK(res.records.size() == 1);
    CHECK(res.skipped == 1);
    CHECK(res.records[0].full_text == "text, with comma");
    CHECK_THROWS(load_tweets(f.path, TweetFormat::csv, true));
}

TEST_CASE("load_tweets: missing file") {
    CHECK_THROWS(load_tweets("/nonexistent/nope.jsonl", TweetFormat::jsonl, false));
}

TEST_CASE("normalize_location: fixture cases") {
    auto gaz = fixture_gazetteer();
    auto moselle = normalize_location("Moselle", gaz);
    REQUIRE(moselle);
    CHECK(location_path_to_string(*moselle) == "Moselle, Lorraine, France");

    CHECK_FALSE(normalize_location("", gaz));
    CHECK_FALSE(normalize_location("Atlantis-99", gaz));

    // diacritics and case fold away
    auto liege = normalize_location("LIEGE", gaz);
    REQUIRE(liege);
    CHECK(location_path_to_string(*liege) == "Liège, Wallonia, Belgium");
    auto sb = normalize_location("Saarbrücken", gaz);
    REQUIRE(sb);
    CHECK(location_path_to_string(*sb) == "Saarbrücken, Saarland, Germany");

    // comma token: the longest matching pattern wins
    auto metz = normalize_location("Metz, France", gaz);
    REQUIRE(metz);
    CHECK(location_path_to_string(*metz) == "Metz, Lorraine, France");

    // ambiguous name resolved by priority
    auto lux = normalize_location("Luxembourg", gaz);
    REQUIRE(lux);
    CHECK(location_path_to_string(*lux) == "Luxembourg");
}

TEST_CASE("normalize_location: tie-breaking order") {
    std::vector<GazetteerEntry> gaz{
        {"springfield", {"Springfield", "Illinois", "USA"}, 0},
        {"springfield", {"Springfield", "Missouri", "USA"}, 0},
        {"springfield", {"Springfield", "Ohio", "USA"}, 2},
    };
    auto hit = normalize_location("Springfield!", gaz);
    REQUIRE(hit);
    CHECK(location_path_to_string(*hit) == "Springfield, Ohio, USA");  // priority wins
    gaz[2].priority = 0;
    hit = normalize_location("springfield", gaz);
    REQUIRE(hit);
    CHECK(location_path_to_string(*hit) == "Springfield, Illinois, USA");  // lexicographic
}

TEST_CASE("normalize_location idempotent on canonical strings") {
    auto gaz = fixture_gazetteer();
    std::size_t checked = 0;
    for (const auto& entry : gaz) {
        if (entry.pattern == fold_ascii(location_path_to_string(entry.canonical))) {
            auto res = normalize_location(location_path_to_string(entry.canonical), gaz);
            REQUIRE(res);
            CHECK(location_path_to_string(*res) ==
                  location_path_to_string(entry.canonical));
            ++checked;
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("assign_region: GR membership by suffix") {
    auto specs = fixture_regions();
    TweetRecord rec;
    rec.tweet_id = "1";
    rec.user_geo = parse_location_path("Moselle, Lorraine, France");
    auto regions = assign_region(rec, specs);
    CHECK(regions == std::vector<std::string>{"GR", "France"});

    rec.user_geo = parse_location_path("Berlin, Germany");
    regions = assign_region(rec, specs);
    CHECK(regions == std::vector<std::string>{"Germany"});

    rec.user_geo.reset();
    CHECK(assign_region(rec, specs).empty());
}

TEST_CASE("assign_region monotonic under added specs") {
    auto specs = fixture_regions();
    TweetRecord rec;
    rec.tweet_id = "1";
    rec.user_geo = parse_location_path("Esch-sur-Alzette, Luxembourg");
    auto before = assign_region(rec, specs);
    specs.push_back(RegionSpec{"Benelux", {parse_location_path("Luxembourg"),
                                           parse_location_path("Belgium")}});
    auto after = assign_region(rec, specs);
    for (const auto& r : before) {
        CHECK(std::find(after.begin(), after.end(), r) != after.end());
    }
    CHECK(std::find(after.begin(), after.end(), "Benelux") != after.end());
}

TEST_CASE("region specs reject covering members") {
    TempFile f("regions_bad.json",
               R"({"regions":[{"name":"X","members":["France","Lorraine, France"]}]})");
    CHECK_THROWS_WITH(load_region_specs(f.path),
                      Catch::Matchers::ContainsSubstring("covers another"));
}

TEST_CASE("aggregate_region_cases: zero fill, clamping, additivity") {
    std::vector<CaseRecord> records;
    auto d = [](const char* s) { return *Date::parse(s); };
    records.push_back({d("2020-03-10"), parse_location_path("Lorraine, France"), 40, 1});
    records.push_back({d("2020-03-18"), parse_location_path("Lorraine, France"), 50, 1});
    records.push_back({d("2020-03-10"), parse_location_path("Luxembourg"), 5, 0});
    records.push_back({d("2020-03-11"), parse_location_path("Luxembourg"), 5, 0});
    records.push_back({d("2020-03-11"), parse_location_path("Wallonia, Belgium"), 5, 0});
    records.push_back({d("2020-03-12"), parse_location_path("Wallonia, Belgium"), -7, 0});

    RegionSpec gr{"GR",
                  {parse_location_path("Luxembourg"), parse_location_path("Wallonia, Belgium"),
                   parse_location_path("Lorraine, France")}};
    std::map<std::string, Date> zero_fill{{"Lorraine, France", d("2020-03-18")}};
    auto series = aggregate_region_cases(records, gr, zero_fill);

    CHECK(series.start == d("2020-03-10"));
    CHECK(series.size() == 9);
    // 03-10: Lorraine 40 suppressed, Luxembourg 5
    CHECK(series.values[0] == 5.0);
    // 03-11: two members, 5 + 5
    CHECK(series.values[1] == 10.0);
    // 03-12: -7 clamps to 0
    CHECK(series.values[2] == 0.0);
    REQUIRE(series.clamped_days.size() == 1);
    CHECK(series.clamped_days[0] == d("2020-03-12"));
    REQUIRE(series.zero_fill_days.size() == 1);
    CHECK(series.zero_fill_days[0] == d("2020-03-10"));
    // 03-18: Lorraine now contributes
    CHECK(series.values[8] == 50.0);

    RegionSpec nowhere{"Nowhere", {parse_location_path("Atlantis")}};
    CHECK_THROWS_WITH(aggregate_region_cases(records, nowhere, {}),
                      Catch::Matchers::ContainsSubstring("Nowhere"));
}

TEST_CASE("aggregate_region_cases equals brute-force member sum") {
    Rng rng(77);
    auto base = *Date::parse("2020-03-01");
    const std::vector<std::string> members{"A, X", "B, X", "C, X", "D, X", "E, X"};
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<CaseRecord> records;
        const int days = 30;
        std::vector<std::vector<long long>> raw(members.size(),
                                                std::vector<long long>(days, 0));
        std::vector<std::vector<bool>> present(members.size(), std::vector<bool>(days, false));
        for (std::size_t m = 0; m < members.size(); ++m) {
            for (int day = 0; day < days; ++day) {
                if (rng.uniform01() < 0.2) continue;  // gap day
                long long v = rng.uniform_int(-5, 60);
                raw[m][day] = v;
                present[m][day] = true;
                records.push_back({base + day, parse_location_path(members[m]), v, 0});
            }
        }
        std::map<std::string, Date> zero_fill{{"B, X", base + 10}};
        RegionSpec spec{"X", {}};
        for (const auto& m : members) spec.members.push_back(parse_location_path(m));
        auto series = aggregate_region_cases(records, spec, zero_fill);

        for (int day = 0; day < days; ++day) {
            double expected = 0.0;
            for (std::size_t m = 0; m < members.size(); ++m) {
                if (!present[m][day]) continue;
                long long v = raw[m][day];
                if (members[m] == "B, X" && day < 10) v = 0;  // zero-fill
                expected += static_cast<double>(std::max<long long>(0, v));
            }
            const int offset = static_cast<int>(series.start - base);
            const int idx = day - offset;
            if (idx >= 0 && idx < static_cast<int>(series.size())) {
                CHECK(series.values[static_cast<std::size_t>(idx)] == expected);
            } else {
                CHECK(expected == 0.0);  // outside the matched range means no data
            }
        }
    }
}

TEST_CASE("daily_volume counts per region and window") {
    auto specs = fixture_regions();
    const RegionSpec* gr = nullptr;
    for (const auto& s : specs) {
        if (s.name == "GR") gr = &s;
    }
    REQUIRE(gr);
    auto d = [](const char* s) { return *Date::parse(s); };
    std::vector<TweetRecord> tweets;
    auto mk = [&](const char* id, const char* geo, const char* date) {
        TweetRecord r;
        r.tweet_id = id;
        r.user_geo = parse_location_path(geo);
        r.date = *Date::parse(date);
        tweets.push_back(r);
    };
    mk("1", "Metz, Lorraine, France", "2020-03-02");
    mk("2", "Metz, Lorraine, France", "2020-03-02");
    mk("3", "Luxembourg City, Luxembourg", "2020-03-02");
    mk("4", "Paris, Ile-de-France, France", "2020-03-02");  // France, not GR
    mk("5", "Metz, Lorraine, France", "2020-03-05");        // outside window
    TweetRecord no_geo;
    no_geo.tweet_id = "6";
    no_geo.date = d("2020-03-02");
    tweets.push_back(no_geo);

    DateInterval window{d("2020-03-01"), d("2020-03-04")};
    auto vol = daily_volume(tweets, *gr, window);
    REQUIRE(vol.size() == 3);
    CHECK(vol[d("2020-03-01")] == 0);
    CHECK(vol[d("2020-03-02")] == 3);
    CHECK(vol[d("2020-03-03")] == 0);

    long long total = 0;
    for (const auto& [date, n] : vol) total += n;
    long long assigned = 0;
    for (const auto& t : tweets) {
        if (!t.user_geo || !window.contains(t.date)) continue;
        for (const auto& m : gr->members) {
            if (path_has_suffix(*t.user_geo, m)) {
                ++assigned;
                break;
            }
        }
    }
    CHECK(total == assigned);
}

TEST_CASE("fixture dataset loads cleanly") {
    const std::string dir(EPISIGNAL_FIXTURE_DIR);
    auto res = load_tweets(dir + "/tweets.jsonl", TweetFormat::jsonl, true);
    CHECK(res.records.size() > 5000);
    CHECK(res.skipped == 0);
    auto cases = load_cases(dir + "/cases.csv");
    CHECK(cases.size() > 400);
    auto gaz = fixture_gazetteer();
    CHECK(gaz.size() > 40);
    auto specs = fixture_regions();
    CHECK(specs.size() == 5);

    // most tweet locations resolve against the gazetteer
    std::size_t resolved = 0;
    for (const auto& r : res.records) {
        if (r.user_geo_original && normalize_location(*r.user_geo_original, gaz)) ++resolved;
    }
    CHECK(resolved > res.records.size() * 9 / 10);
}
