#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "episignal/classify.hpp"
#include "episignal/config.hpp"
#include "episignal/corr.hpp"
#include "episignal/epi.hpp"
#include "episignal/ingest.hpp"
#include "episignal/manifest.hpp"
#include "episignal/report.hpp"
#include "episignal/textprep.hpp"
#include "episignal/topics.hpp"

namespace episignal::pipeline {

// Bad configuration or missing inputs; the CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageOptions {
    std::string out_dir = "out";
    std::optional<std::string> region_filter;
    bool parallel = false;
};

namespace detail {

inline std::string out_path(const StageOptions& opts, const std::string& name) {
    return (std::filesystem::path(opts.out_dir) / name).string();
}

inline void require_input(const std::string& path, const std::string& what) {
    if (path.empty() || !std::filesystem::exists(path)) {
        throw ValidationError("missing " + what + ": " +
                              (path.empty() ? "(not configured)" : path));
    }
}

inline void require_stage_output(const StageOptions& opts, const std::string& name,
                                 const std::string& producing_stage) {
    const auto path = out_path(opts, name);
    if (!std::filesystem::exists(path)) {
        throw ValidationError(name + " not found in " + opts.out_dir + "; run the " +
                              producing_stage + " stage first");
    }
}

inline std::vector<ingest::RegionSpec> load_regions(const config::PipelineConfig& cfg,
                                                    const StageOptions& opts) {
    require_input(cfg.regions_path, "region spec file (ingest.regions)");
    auto specs = ingest::load_region_specs(cfg.regions_path);
    if (opts.region_filter) {
        std::vector<ingest::RegionSpec> filtered;
        for (auto& s : specs) {
            if (s.name == *opts.region_filter) filtered.push_back(std::move(s));
        }
        if (filtered.empty()) {
            throw ValidationError("unknown region: " + *opts.region_filter);
        }
        return filtered;
    }
    return specs;
}

inline corr::DailySeries load_daily_csv(const std::string& path, const std::string& value_col) {
    CsvReader reader(path);
    const int c_date = reader.require_column("date");
    const int c_val = reader.require_column(value_col);
    corr::DailySeries out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        auto d = Date::parse(f[static_cast<std::size_t>(c_date)]);
        if (!d) throw std::runtime_error("bad date in " + path);
        out[*d] = std::stod(f[static_cast<std::size_t>(c_val)]);
    }
    return out;
}

inline ingest::CaseSeries load_case_series(const std::string& path, const std::string& region) {
    auto daily = load_daily_csv(path, "new_cases");
    if (daily.empty()) throw std::runtime_error("empty case series: " + path);
    ingest::CaseSeries s;
    s.region = region;
    s.start = daily.begin()->first;
    for (Date d = daily.begin()->first; d <= daily.rbegin()->first; ++d) {
        auto it = daily.find(d);
        s.values.push_back(it == daily.end() ? 0.0 : it->second);
    }
    return s;
}

inline std::vector<ingest::TweetRecord> load_normalized_tweets(const StageOptions& opts) {
    require_stage_output(opts, "tweets_normalized.jsonl", "ingest");
    auto res = ingest::load_tweets(out_path(opts, "tweets_normalized.jsonl"),
                                   ingest::TweetFormat::jsonl, true);
    return std::move(res.records);
}

inline textprep::PreprocessConfig build_textprep(const config::PipelineConfig& cfg) {
    textprep::PreprocessConfig pc;
    if (!cfg.stopwords_dir.empty()) {
        require_input(cfg.stopwords_dir, "stopword directory (textprep.stopwords_dir)");
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(cfg.stopwords_dir)) {
            if (entry.path().extension() == ".txt") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            pc.stopword_lists[file.stem().string()] =
                textprep::load_stopword_file(file.string());
        }
    }
    pc.spell_correct = cfg.spell_correct;
    if (cfg.spell_correct) {
        require_input(cfg.dictionary_path, "spell dictionary (textprep.dictionary)");
        pc.dictionary = textprep::SpellDictionary::load(cfg.dictionary_path);
    }
    pc.pos_filter = cfg.pos_filter;
    if (cfg.pos_filter) {
        require_input(cfg.pos_lexicon_path, "POS lexicon (textprep.pos_lexicon)");
        pc.pos_lexicon = textprep::load_pos_lexicon(cfg.pos_lexicon_path);
    }
    pc.stem = cfg.stem;
    return pc;
}

inline void write_manifest(const config::PipelineConfig& cfg, const StageOptions& opts) {
    report::write_json(report::build_manifest(cfg), out_path(opts, "manifest.json"));
}

}  // namespace detail

// Loads and normalizes tweets, aggregates regional case series, writes the
// normalized tweet file, per-region volume and case CSVs, and the summary.
inline void run_ingest(const config::PipelineConfig& cfg, const StageOptions& opts) {
    detail::require_input(cfg.tweets_path, "tweet file (ingest.tweets)");
    detail::require_input(cfg.cases_path, "case file (ingest.cases)");
    detail::require_input(cfg.gazetteer_path, "gazetteer (ingest.gazetteer)");
    auto specs = detail::load_regions(cfg, opts);
    std::filesystem::create_directories(opts.out_dir);

    auto gazetteer = ingest::load_gazetteer(cfg.gazetteer_path);
    auto loaded = ingest::load_tweets(
        cfg.tweets_path,
        cfg.tweets_format == "jsonl" ? ingest::TweetFormat::jsonl : ingest::TweetFormat::csv,
        cfg.strict);
    const DateInterval window = cfg.study_window();
    std::vector<ingest::TweetRecord> records;
    for (auto& rec : loaded.records) {
        if (!window.contains(rec.date)) continue;
        if (!rec.user_geo && rec.user_geo_original) {
            rec.user_geo = ingest::normalize_location(*rec.user_geo_original, gazetteer);
        }
        records.push_back(std::move(rec));
    }

    {
        std::ofstream out(detail::out_path(opts, "tweets_normalized.jsonl"), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write normalized tweets");
        for (const auto& rec : records) {
            nlohmann::json j;
            j["tweet_id"] = rec.tweet_id;
            j["full_text"] = rec.full_text;
            j["user_id"] = rec.user_id;
            j["date"] = rec.date.to_iso();
            if (rec.user_geo_original) j["user_geo_original"] = *rec.user_geo_original;
            if (rec.user_geo) j["user_geo"] = ingest::location_path_to_string(*rec.user_geo);
            out << j.dump() << '\n';
        }
    }

    auto cases = ingest::load_cases(cfg.cases_path);
    for (const auto& spec : specs) {
        auto volume = ingest::daily_volume(records, spec, window);
        CsvWriter vw(detail::out_path(opts, "volume_" + spec.name + ".csv"));
        vw.row({"date", "count"});
        for (const auto& [date, count] : volume) {
            vw.row({date.to_iso(), std::to_string(count)});
        }

        auto series = ingest::aggregate_region_cases(cases, spec, cfg.zero_fill_before);
        std::set<std::int32_t> clamped, zero_filled;
        for (auto d : series.clamped_days) clamped.insert(d.days);
        for (auto d : series.zero_fill_days) zero_filled.insert(d.days);
        CsvWriter cw(detail::out_path(opts, "cases_" + spec.name + ".csv"));
        cw.row({"date", "new_cases", "clamped", "zero_filled"});
        for (std::size_t i = 0; i < series.size(); ++i) {
            const Date d = series.date_at(i);
            if (!window.contains(d)) continue;
            cw.row({d.to_iso(), format_float(series.values[i]),
                    clamped.count(d.days) ? "1" : "0", zero_filled.count(d.days) ? "1" : "0"});
        }
    }

    CsvWriter sw(detail::out_path(opts, "summary.csv"));
    sw.row({"region", "tweet_volume", "user_volume"});
    {
        std::set<std::string> users;
        for (const auto& r : records) users.insert(r.user_id);
        sw.row({"Global", std::to_string(records.size()), std::to_string(users.size())});
    }
    for (const auto& spec : specs) {
        std::size_t volume = 0;
        std::set<std::string> users;
        for (const auto& rec : records) {
            if (!rec.user_geo) continue;
            for (const auto& member : spec.members) {
                if (ingest::path_has_suffix(*rec.user_geo, member)) {
                    ++volume;
                    users.insert(rec.user_id);
                    break;
                }
            }
        }
        sw.row({spec.name, std::to_string(volume), std::to_string(users.size())});
    }
    detail::write_manifest(cfg, opts);
}

// Smooths each regional case series and runs the Bayesian filter.
inline void run_rt(const config::PipelineConfig& cfg, const StageOptions& opts) {
    auto specs = detail::load_regions(cfg, opts);
    for (const auto& spec : specs) {
        const auto path = "cases_" + spec.name + ".csv";
        detail::require_stage_output(opts, path, "ingest");
        auto series = detail::load_case_series(detail::out_path(opts, path), spec.name);
        auto smoothed = epi::smooth_cases(series, cfg.smooth_window, cfg.smooth_sigma);
        auto rt = epi::estimate_rt(smoothed, cfg.grid, cfg.sigma_rw, cfg.serial_interval,
                                   cfg.interval_mass);
        epi::write_rt_csv(rt, detail::out_path(opts, "rt_" + spec.name + ".csv"));
    }
    detail::write_manifest(cfg, opts);
}

// Threshold-slices each region's MAP trajectory into the four periods.
inline void run_periods(const config::PipelineConfig& cfg, const StageOptions& opts) {
    auto specs = detail::load_regions(cfg, opts);
    nlohmann::json all = nlohmann::json::object();
    for (const auto& spec : specs) {
        const auto path = "rt_" + spec.name + ".csv";
        detail::require_stage_output(opts, path, "rt");
        CsvReader reader(detail::out_path(opts, path));
        const int c_date = reader.require_column("date");
        const int c_map = reader.require_column("map");
        epi::RtPosterior rt;
        rt.grid = cfg.grid;
        std::vector<std::string> f;
        while (reader.next(f)) {
            rt.dates.push_back(*Date::parse(f[static_cast<std::size_t>(c_date)]));
            rt.map_estimate.push_back(std::stod(f[static_cast<std::size_t>(c_map)]));
        }
        all[spec.name] = epi::periods_to_json(epi::slice_periods(rt, cfg.r0_min, cfg.r0_max));
    }
    report::write_json(all, detail::out_path(opts, "periods.json"));
    detail::write_manifest(cfg, opts);
}

// Lag scans per (region, period) plus trend tests on the volume series.
inline void run_correlate(const config::PipelineConfig& cfg, const StageOptions& opts) {
    auto specs = detail::load_regions(cfg, opts);
    detail::require_stage_output(opts, "periods.json", "periods");
    auto periods_json = report::read_json(detail::out_path(opts, "periods.json"));

    CsvWriter cw(detail::out_path(opts, "lag_correlations.csv"));
    cw.row({"region", "period", "lag", "r", "p", "n", "strength"});
    nlohmann::json best = nlohmann::json::object();
    static const std::pair<const char*, DateInterval epi::PandemicPeriods::*> period_fields[] = {
        {"pre_peak", &epi::PandemicPeriods::pre_peak},
        {"free_contagious", &epi::PandemicPeriods::free_contagious},
        {"measures", &epi::PandemicPeriods::measures},
        {"decay", &epi::PandemicPeriods::decay},
    };
    for (const auto& spec : specs) {
        detail::require_stage_output(opts, "volume_" + spec.name + ".csv", "ingest");
        detail::require_stage_output(opts, "cases_" + spec.name + ".csv", "ingest");
        auto volume = detail::load_daily_csv(
            detail::out_path(opts, "volume_" + spec.name + ".csv"), "count");
        auto cases = detail::load_daily_csv(
            detail::out_path(opts, "cases_" + spec.name + ".csv"), "new_cases");
        if (!periods_json.contains(spec.name)) {
            throw ValidationError("periods.json has no entry for region " + spec.name);
        }
        auto periods = epi::periods_from_json(periods_json.at(spec.name));
        nlohmann::json region_best = nlohmann::json::object();
        for (const auto& [name, field] : period_fields) {
            const DateInterval& interval = periods.*field;
            nlohmann::json entry;
            entry["days"] = interval.length();
            if (interval.empty()) {
                entry["best_lead"] = nullptr;
                entry["note"] = "empty period";
                region_best[name] = entry;
                continue;
            }
            auto scan = corr::lag_scan(cases, volume, interval, cfg.lag_min, cfg.lag_max);
            for (const auto& c : scan.correlations) {
                cw.row({spec.name, name, std::to_string(c.lag), format_float(c.r),
                        format_float(c.p), std::to_string(c.n),
                        corr::strength_name(corr::classify_strength(c.r, c.p))});
            }
            if (scan.best_lead) {
                for (const auto& c : scan.correlations) {
                    if (c.lag == *scan.best_lead) {
                        entry["best_lead"] = c.lag;
                        entry["r"] = report::report_num(c.r);
                        entry["p"] = report::report_num(c.p);
                        entry["strength"] =
                            corr::strength_name(corr::classify_strength(c.r, c.p));
                    }
                }
            } else {
                entry["best_lead"] = nullptr;
            }
            if (!scan.skipped_lags.empty()) entry["skipped_lags"] = scan.skipped_lags;
            // volume trend inside the period
            corr::DailySeries in_period;
            for (const auto& [d, v] : volume) {
                if (interval.contains(d)) in_period[d] = v;
            }
            if (in_period.size() >= 8) {
                auto trend = corr::trend_test(in_period);
                entry["volume_trend"] = {{"direction", trend_direction_name(trend.direction)},
                                         {"p", report::report_num(trend.p)}};
            } else {
                entry["volume_trend"] = nullptr;
            }
            region_best[name] = entry;
        }
        best[spec.name] = region_best;
    }
    best["_metadata"] = {{"caveat",
                          "no multiple-comparison correction is applied across lags"},
                         {"lag_min", cfg.lag_min},
                         {"lag_max", cfg.lag_max}};
    report::write_json(best, detail::out_path(opts, "best_leads.json"));
    detail::write_manifest(cfg, opts);
}

namespace detail {

inline nlohmann::json cluster_to_json(const topics::TopicCluster& c) {
    nlohmann::json j;
    j["cluster_id"] = c.cluster_id;
    j["member_ids"] = c.member_ids;
    j["valid"] = c.valid;
    nlohmann::json words = nlohmann::json::array();
    for (const auto& [w, count] : c.top_words) {
        words.push_back(nlohmann::json::array({w, count}));
    }
    j["top_words"] = words;
    return j;
}

inline void run_topics_region(const config::PipelineConfig& cfg, const StageOptions& opts,
                              const ingest::RegionSpec& spec,
                              const std::vector<ingest::TweetRecord>& records,
                              const std::vector<textprep::TokenizedTweet>& tokenized,
                              const topics::EmbeddingProvider& provider) {
    const DateInterval window = cfg.study_window();
    nlohmann::json out;
    out["region"] = spec.name;
    out["tuned"] = cfg.tune;
    nlohmann::json days = nlohmann::json::array();
    for (Date day = window.begin; day < window.end; ++day) {
        std::vector<textprep::TokenizedTweet> docs;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].date != day || !records[i].user_geo) continue;
            for (const auto& member : spec.members) {
                if (ingest::path_has_suffix(*records[i].user_geo, member)) {
                    docs.push_back(tokenized[i]);
                    break;
                }
            }
        }
        nlohmann::json entry;
        entry["date"] = day.to_iso();
        entry["n_docs"] = docs.size();
        if (docs.size() < cfg.min_docs_per_day) {
            entry["skipped"] = "fewer than min_docs_per_day documents";
            days.push_back(entry);
            continue;
        }
        topics::CteParams params = cfg.cte;
        params.seed = derive_seed(cfg.seed ^ topics::fnv1a(spec.name),
                                  static_cast<std::uint64_t>(day - window.begin));
        try {
            if (cfg.tune) {
                std::vector<std::size_t> k_grid;
                for (std::size_t k = cfg.tune_k_min;
                     k <= std::min(cfg.tune_k_max, docs.size()); ++k) {
                    k_grid.push_back(k);
                }
                auto tuned = topics::tune_hyperparams(docs, provider, params, k_grid,
                                                      cfg.tune_gamma_grid, params.seed);
                params.k = tuned.best_k;
                params.gamma = tuned.best_gamma;
            }
            if (params.k > docs.size()) {
                params.k = docs.size();
                entry["k_clamped"] = true;
            }
            auto res = topics::run_cte(docs, provider, params, day, spec.name);
            entry["k"] = params.k;
            entry["gamma"] = params.gamma;
            entry["coherence"] = report::report_num(res.coherence_score);
            entry["silhouette"] = report::report_num(res.silhouette_score);
            nlohmann::json clusters = nlohmann::json::array();
            for (const auto& c : res.clusters) clusters.push_back(cluster_to_json(c));
            entry["clusters"] = clusters;
        } catch (const std::exception& e) {
            entry["skipped"] = e.what();
        }
        days.push_back(entry);
    }
    out["days"] = days;
    report::write_json(out, out_path(opts, "topics_" + spec.name + ".json"));
}

}  // namespace detail

// Daily CTE topic extraction per region. Per-day seeds derive from the master
// seed, the region name and the day offset, so --parallel reproduces the
// sequential output exactly.
inline void run_topics(const config::PipelineConfig& cfg, const StageOptions& opts) {
    auto specs = detail::load_regions(cfg, opts);
    auto records = detail::load_normalized_tweets(opts);
    auto prep = detail::build_textprep(cfg);
    std::vector<textprep::TokenizedTweet> tokenized;
    tokenized.reserve(records.size());
    for (const auto& rec : records) {
        tokenized.push_back({rec.tweet_id, textprep::preprocess(rec.full_text, prep)});
    }
    topics::EmbeddingProvider provider =
        cfg.embedding_mode == "precomputed"
            ? topics::EmbeddingProvider::from_file(cfg.embedding_file)
            : topics::EmbeddingProvider::hashed(cfg.cte.embedding_dim);

    if (opts.parallel && specs.size() > 1) {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) {
            workers.emplace_back([&, i] {
                try {
                    detail::run_topics_region(cfg, opts, specs[i], records, tokenized, provider);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    } else {
        for (const auto& spec : specs) {
            detail::run_topics_region(cfg, opts, spec, records, tokenized, provider);
        }
    }
    detail::write_manifest(cfg, opts);
}

// Trains the category classifier on the labeled fixture and classifies every
// valid extracted topic.
inline void run_classify(const config::PipelineConfig& cfg, const StageOptions& opts) {
    detail::require_input(cfg.labeled_topics_path, "labeled topics (classify.labeled_topics)");
    auto specs = detail::load_regions(cfg, opts);
    auto labeled = classify::load_labeled_topics(cfg.labeled_topics_path);
    auto features = classify::build_features(labeled, cfg.country_encoding);
    classify::TrainConfig train_cfg = cfg.train;
    train_cfg.seed = derive_seed(cfg.seed, topics::fnv1a("classify"));
    auto trained = classify::train_svm(features.vectors, features.labels, train_cfg);

    {
        CsvWriter mw(detail::out_path(opts, "classifier_metrics.csv"));
        mw.row({"category", "precision", "recall", "f1", "support"});
        for (const auto& m : trained.test_report.per_class) {
            mw.row({std::to_string(m.category), format_float(m.precision),
                    format_float(m.recall), format_float(m.f1), std::to_string(m.support)});
        }
        mw.row({"macro_avg", format_float(trained.test_report.macro_precision),
                format_float(trained.test_report.macro_recall),
                format_float(trained.test_report.macro_f1),
                std::to_string(trained.test_labels.size())});
    }
    {
        nlohmann::json model;
        model["format_version"] = kVersion;
        model["model"] = trained.model.to_json();
        model["vectorizer"] = features.vectorizer.to_json();
        model["country_encoding"] =
            cfg.country_encoding == classify::CountryEncoding::onehot ? "onehot" : "integer";
        nlohmann::json grid = nlohmann::json::array();
        for (const auto& cell : trained.model.grid_report) {
            grid.push_back({{"kernel", classify::kernel_name(cell.kernel)},
                            {"C", cell.C},
                            {"rbf_gamma", cell.rbf_gamma},
                            {"cv_macro_f1", cell.cv_macro_f1}});
        }
        model["grid_report"] = grid;
        model["chosen"] = {{"kernel", classify::kernel_name(trained.model.chosen.kernel)},
                           {"C", trained.model.chosen.C},
                           {"rbf_gamma", trained.model.chosen.rbf_gamma},
                           {"cv_macro_f1", trained.model.chosen.cv_macro_f1}};
        report::write_json(model, detail::out_path(opts, "model.json"));
    }

    CsvWriter pw(detail::out_path(opts, "topic_predictions.csv"));
    pw.row({"topic_id", "region", "date", "cluster_id", "category", "members"});
    for (const auto& spec : specs) {
        const auto path = "topics_" + spec.name + ".json";
        detail::require_stage_output(opts, path, "topics");
        auto region_topics = report::read_json(detail::out_path(opts, path));
        for (const auto& day : region_topics.at("days")) {
            if (!day.contains("clusters")) continue;
            for (const auto& cluster : day.at("clusters")) {
                if (!cluster.at("valid").get<bool>()) continue;
                std::vector<std::string> words;
                for (const auto& pair : cluster.at("top_words")) {
                    words.push_back(pair.at(0).get<std::string>());
                }
                auto vec = features.vectorizer.transform(words);
                classify::append_country_block(vec, spec.name, cfg.country_encoding);
                const int category = trained.model.predict(vec);
                const std::string date = day.at("date").get<std::string>();
                const auto cluster_id = cluster.at("cluster_id").get<std::size_t>();
                pw.row({spec.name + "/" + date + "/" + std::to_string(cluster_id), spec.name,
                        date, std::to_string(cluster_id), std::to_string(category),
                        std::to_string(cluster.at("member_ids").size())});
            }
        }
    }
    detail::write_manifest(cfg, opts);
}

// Emits the remaining report artifacts: CR heatmap, topic counts, ranked word
// frequencies per (region, period), and the dual-axis volume/cases plot.
inline void run_report(const config::PipelineConfig& cfg, const StageOptions& opts) {
    auto specs = detail::load_regions(cfg, opts);
    detail::require_stage_output(opts, "topic_predictions.csv", "classify");
    detail::require_stage_output(opts, "periods.json", "periods");
    const DateInterval window = cfg.study_window();

    std::vector<report::ClassifiedTopic> classified;
    {
        CsvReader reader(detail::out_path(opts, "topic_predictions.csv"));
        const int c_region = reader.require_column("region");
        const int c_date = reader.require_column("date");
        const int c_cluster = reader.require_column("cluster_id");
        const int c_category = reader.require_column("category");
        const int c_members = reader.require_column("members");
        std::vector<std::string> f;
        while (reader.next(f)) {
            report::ClassifiedTopic t;
            t.region = f[static_cast<std::size_t>(c_region)];
            t.day = *Date::parse(f[static_cast<std::size_t>(c_date)]);
            t.cluster_id = std::stoul(f[static_cast<std::size_t>(c_cluster)]);
            t.category = std::stoi(f[static_cast<std::size_t>(c_category)]);
            t.member_count = std::stoul(f[static_cast<std::size_t>(c_members)]);
            classified.push_back(std::move(t));
        }
    }

    std::vector<report::CategoryRateSeries> cr;
    std::vector<std::string> region_names;
    for (const auto& spec : specs) {
        region_names.push_back(spec.name);
        cr.push_back(report::category_rate(classified, spec.name, window));
    }
    report::write_cr_heatmap(cr, detail::out_path(opts, "cr_heatmap.csv"));
    report::write_topic_counts(classified, region_names,
                               detail::out_path(opts, "topic_counts.csv"));

    // ranked word frequencies per (region, period)
    auto periods_json = report::read_json(detail::out_path(opts, "periods.json"));
    auto records = detail::load_normalized_tweets(opts);
    auto prep = detail::build_textprep(cfg);
    std::vector<textprep::TokenizedTweet> tokenized;
    tokenized.reserve(records.size());
    for (const auto& rec : records) {
        tokenized.push_back({rec.tweet_id, textprep::preprocess(rec.full_text, prep)});
    }
    static const std::pair<const char*, DateInterval epi::PandemicPeriods::*> period_fields[] = {
        {"pre_peak", &epi::PandemicPeriods::pre_peak},
        {"free_contagious", &epi::PandemicPeriods::free_contagious},
        {"measures", &epi::PandemicPeriods::measures},
        {"decay", &epi::PandemicPeriods::decay},
    };
    for (const auto& spec : specs) {
        if (!periods_json.contains(spec.name)) continue;
        auto periods = epi::periods_from_json(periods_json.at(spec.name));
        for (const auto& [pname, field] : period_fields) {
            const DateInterval& interval = periods.*field;
            if (interval.empty()) continue;
            std::map<std::string, std::size_t> counts;
            for (std::size_t i = 0; i < records.size(); ++i) {
                if (!interval.contains(records[i].date) || !records[i].user_geo) continue;
                bool in_region = false;
                for (const auto& member : spec.members) {
                    if (ingest::path_has_suffix(*records[i].user_geo, member)) {
                        in_region = true;
                        break;
                    }
                }
                if (!in_region) continue;
                for (const auto& token : tokenized[i].tokens) ++counts[token];
            }
            report::write_wordfreq(counts, detail::out_path(opts, "wordfreq_" + spec.name + "_" +
                                                                      pname + ".csv"));
        }
    }

    // volume vs cases plot for the configured region (or the filtered one)
    const std::string plot_region =
        opts.region_filter ? *opts.region_filter : cfg.plot_region;
    bool known = false;
    for (const auto& spec : specs) known |= spec.name == plot_region;
    if (known) {
        auto volume = detail::load_daily_csv(
            detail::out_path(opts, "volume_" + plot_region + ".csv"), "count");
        auto cases = detail::load_daily_csv(
            detail::out_path(opts, "cases_" + plot_region + ".csv"), "new_cases");
        std::optional<epi::PandemicPeriods> periods;
        if (periods_json.contains(plot_region)) {
            periods = epi::periods_from_json(periods_json.at(plot_region));
        }
        report::write_volume_vs_cases_svg(plot_region, volume, cases,
                                          periods ? &*periods : nullptr,
                                          detail::out_path(opts, "volume_vs_cases.svg"));
    }
    detail::write_manifest(cfg, opts);
}

// All stages in order, composing through the same files the staged commands
// use, so staged and monolithic runs emit identical bytes.
inline void run_pipeline(const config::PipelineConfig& cfg, const StageOptions& opts) {
    run_ingest(cfg, opts);
    run_rt(cfg, opts);
    run_periods(cfg, opts);
    run_correlate(cfg, opts);
    run_topics(cfg, opts);
    run_classify(cfg, opts);
    run_report(cfg, opts);
}

}  // namespace episignal::pipeline
