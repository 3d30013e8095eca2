#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "episignal/manifest.hpp"
#include "episignal/report.hpp"

using namespace episignal;
using namespace episignal::report;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ClassifiedTopic topic(const char* region, const char* day, std::size_t cluster, int category,
                      std::size_t members) {
    return {region, *Date::parse(day), cluster, category, members};
}

}  // namespace

TEST_CASE("category_rate: ratios, degenerate days, nulls") {
    std::vector<ClassifiedTopic> topics{
        topic("GR", "2020-03-01", 0, 5, 4),
        topic("GR", "2020-03-01", 1, 1, 6),
        topic("GR", "2020-03-02", 0, 2, 9),
        topic("France", "2020-03-01", 0, 3, 5),
    };
    DateInterval window{*Date::parse("2020-03-01"), *Date::parse("2020-03-04")};
    auto cr = category_rate(topics, "GR", window);
    REQUIRE(cr.dates.size() == 3);

    // day with 10 classified tweets, 4 in category 5
    REQUIRE(cr.shares[0]);
    CHECK((*cr.shares[0])[4] == Catch::Approx(40.0).epsilon(1e-12));
    CHECK((*cr.shares[0])[0] == Catch::Approx(60.0).epsilon(1e-12));

    // all tweets one category
    REQUIRE(cr.shares[1]);
    CHECK((*cr.shares[1])[1] == Catch::Approx(100.0).epsilon(1e-12));
    for (std::size_t c : {0, 2, 3, 4, 5, 6}) CHECK((*cr.shares[1])[c] == 0.0);

    // zero-volume day
    CHECK_FALSE(cr.shares[2]);

    // non-null rows sum to 100
    for (const auto& shares : cr.shares) {
        if (!shares) continue;
        double sum = 0.0;
        for (double v : *shares) sum += v;
        CHECK(std::fabs(sum - 100.0) < 1e-6);
    }
}

TEST_CASE("cr heatmap and topic counts files") {
    const auto dir = std::filesystem::temp_directory_path() / "episignal_report_test";
    std::filesystem::create_directories(dir);
    std::vector<ClassifiedTopic> topics{
        topic("GR", "2020-03-01", 0, 5, 4),
        topic("GR", "2020-03-01", 1, 1, 6),
        topic("France", "2020-03-01", 0, 3, 5),
        topic("France", "2020-03-02", 1, 3, 2),
    };
    DateInterval window{*Date::parse("2020-03-01"), *Date::parse("2020-03-03")};
    std::vector<CategoryRateSeries> cr{category_rate(topics, "GR", window),
                                       category_rate(topics, "France", window)};
    const auto heatmap = (dir / "cr.csv").string();
    write_cr_heatmap(cr, heatmap);
    auto content = slurp(heatmap);
    CHECK(content.find("region,date,cr_1,cr_2,cr_3,cr_4,cr_5,cr_6,cr_7\n") == 0);
    CHECK(content.find("GR,2020-03-01,60,0,0,0,40,0,0") != std::string::npos);
    CHECK(content.find("GR,2020-03-02,,,,,,,") != std::string::npos);  // null day
    CHECK(content.find('\r') == std::string::npos);                    // LF endings only

    const auto counts = (dir / "counts.csv").string();
    write_topic_counts(topics, {"GR", "France"}, counts);
    auto counts_content = slurp(counts);
    CHECK(counts_content.find("category,GR,France,total\n") == 0);
    CHECK(counts_content.find("3,0,2,2") != std::string::npos);
    CHECK(counts_content.find("total,2,2,4") != std::string::npos);

    write_topic_counts({}, {"GR", "France"}, counts);
    CHECK(slurp(counts) == "category,GR,France,total\n");  // header only when empty

    std::filesystem::remove_all(dir);
}

TEST_CASE("wordfreq ranking with ties") {
    const auto path =
        (std::filesystem::temp_directory_path() / "episignal_wordfreq.csv").string();
    write_wordfreq({{"border", 5}, {"apple", 2}, {"zebra", 2}, {"mask", 9}}, path);
    auto content = slurp(path);
    const auto mask = content.find("1,mask,9");
    const auto border = content.find("2,border,5");
    const auto apple = content.find("3,apple,2");
    const auto zebra = content.find("4,zebra,2");
    CHECK(mask != std::string::npos);
    CHECK(border != std::string::npos);
    CHECK(apple != std::string::npos);
    CHECK(zebra != std::string::npos);
    CHECK(apple < zebra);  // ties resolve lexicographically
    std::remove(path.c_str());
}

TEST_CASE("svg plot contains the series and period bands") {
    corr::DailySeries volume, cases;
    Date d0 = *Date::parse("2020-03-01");
    for (int i = 0; i < 30; ++i) {
        volume[d0 + i] = 5.0 + i;
        cases[d0 + i] = 100.0 * (i + 1);
    }
    epi::PandemicPeriods periods;
    periods.pre_peak = {d0, d0 + 10};
    periods.free_contagious = {d0 + 10, d0 + 15};
    periods.measures = {d0 + 15, d0 + 22};
    periods.decay = {d0 + 22, d0 + 30};
    periods.t0 = d0 + 8;
    periods.t1 = d0 + 10;
    const auto path = (std::filesystem::temp_directory_path() / "episignal_plot.svg").string();
    write_volume_vs_cases_svg("GR", volume, cases, &periods, path);
    auto svg = slurp(path);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("viewBox=\"0 0 960 480\"") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
    // two polylines and four shaded bands
    std::size_t polylines = 0, bands = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        ++pos;
    }
    pos = 0;
    while ((pos = svg.find("opacity=\"0.7\"", pos)) != std::string::npos) {
        ++bands;
        ++pos;
    }
    CHECK(polylines == 2);
    CHECK(bands == 4);
    // deterministic: identical bytes on rewrite
    const auto again = path + ".2";
    write_volume_vs_cases_svg("GR", volume, cases, &periods, again);
    CHECK(svg == slurp(again));
    std::remove(path.c_str());
    std::remove(again.c_str());
}

TEST_CASE("manifest is reproducible under SOURCE_DATE_EPOCH") {
    const std::string fixture_toml = std::string(EPISIGNAL_FIXTURE_DIR) + "/fixture.toml";
    auto cfg = config::load_config(fixture_toml);
    setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    auto a = build_manifest(cfg);
    auto b = build_manifest(cfg);
    CHECK(a.dump(2) == b.dump(2));
    CHECK(a.at("seed") == 42);
    CHECK(a.at("timestamp_utc") == "2023-11-14T22:13:20Z");
    // input digests cover the configured files
    CHECK(a.at("inputs").size() >= 4);
    for (const auto& [path, digest] : a.at("inputs").items()) {
        CHECK(digest.get<std::string>().size() == 64);
    }
    unsetenv("SOURCE_DATE_EPOCH");
    auto c = build_manifest(cfg);
    CHECK(c.at("timestamp_utc") != "2023-11-14T22:13:20Z");
}
