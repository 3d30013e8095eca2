#pragma once

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "episignal/config.hpp"
#include "episignal/sha256.hpp"

namespace episignal {

inline constexpr const char* kVersion = "0.1.0";

namespace report {

// Snapshot of everything a run depends on. Artifacts from one run all refer
// to the manifest written next to them; identical manifests mean re-runs
// reproduce identical CSV/JSON bytes. The timestamp honors SOURCE_DATE_EPOCH
// so controlled runs are byte-stable.
inline nlohmann::json build_manifest(const config::PipelineConfig& cfg) {
    nlohmann::json j;
    j["generator"] = {{"name", "episignal"}, {"version", kVersion}};
    j["modules"] = {{"ingest", kVersion},  {"epi", kVersion},      {"corr", kVersion},
                    {"textprep", kVersion}, {"topics", kVersion},  {"classify", kVersion},
                    {"report", kVersion}};
    j["seed"] = cfg.seed;
    std::time_t now;
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        now = static_cast<std::time_t>(std::stoll(sde));
    } else {
        now = std::time(nullptr);
    }
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j["timestamp_utc"] = buf;
    j["config"] = config::config_snapshot(cfg);
    nlohmann::json inputs = nlohmann::json::object();
    for (const std::string& path :
         {cfg.tweets_path, cfg.cases_path, cfg.gazetteer_path, cfg.regions_path,
          cfg.labeled_topics_path}) {
        if (!path.empty() && std::filesystem::exists(path)) {
            inputs[path] = Sha256::of_file(path);
        }
    }
    j["inputs"] = inputs;
    j["caveats"] = nlohmann::json::array(
        {"lag correlations apply no multiple-comparison correction across lags"});
    return j;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return nlohmann::json::parse(in);
}

}  // namespace report
}  // namespace episignal
