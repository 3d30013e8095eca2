#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "episignal/classify.hpp"
#include "episignal/date.hpp"
#include "episignal/epi.hpp"
#include "episignal/textutil.hpp"
#include "episignal/topics.hpp"

namespace episignal::config {

// Minimal TOML reader covering what the pipeline config uses: [sections],
// scalar keys (string, integer, float, boolean) and flat arrays of scalars.
class Toml {
public:
    using Value = std::variant<std::string, std::int64_t, double, bool,
                               std::vector<std::string>, std::vector<double>>;

    static Toml parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config: " + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return parse(text);
    }

    static Toml parse(const std::string& text) {
        Toml t;
        std::string section;
        std::size_t line_no = 0;
        for (const auto& raw : split(text, '\n')) {
            ++line_no;
            std::string line(trim(strip_comment(raw)));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw std::runtime_error(err(line_no, "bad section"));
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (section.empty()) throw std::runtime_error(err(line_no, "empty section"));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::runtime_error(err(line_no, "expected '='"));
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (key.empty() || value.empty()) {
                throw std::runtime_error(err(line_no, "empty key or value"));
            }
            t.values_[section.empty() ? key : section + "." + key] = parse_value(value, line_no);
        }
        return t;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
        throw std::runtime_error("config key is not a string: " + key);
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
        throw std::runtime_error("config key is not an integer: " + key);
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const auto* v = std::get_if<double>(&it->second)) return *v;
        if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
            return static_cast<double>(*i);
        }
        throw std::runtime_error("config key is not a number: " + key);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const auto* v = std::get_if<bool>(&it->second)) return *v;
        throw std::runtime_error("config key is not a boolean: " + key);
    }

    std::vector<std::string> get_string_array(const std::string& key,
                                              std::vector<std::string> fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const auto* v = std::get_if<std::vector<std::string>>(&it->second)) return *v;
        throw std::runtime_error("config key is not a string array: " + key);
    }

    std::vector<double> get_double_array(const std::string& key,
                                         std::vector<double> fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
        throw std::runtime_error("config key is not a numeric array: " + key);
    }

private:
    static std::string err(std::size_t line, const std::string& what) {
        return "config line " + std::to_string(line) + ": " + what;
    }

    static std::string strip_comment(std::string_view line) {
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
        }
        return std::string(line);
    }

    static Value parse_scalar(const std::string& v, std::size_t line_no) {
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
            return v.substr(1, v.size() - 2);
        }
        if (v == "true") return true;
        if (v == "false") return false;
        const bool looks_float = v.find_first_of(".eE") != std::string::npos;
        try {
            std::size_t pos = 0;
            if (!looks_float) {
                const std::int64_t i = std::stoll(v, &pos);
                if (pos == v.size()) return i;
            }
            const double d = std::stod(v, &pos);
            if (pos == v.size()) return d;
        } catch (const std::exception&) {
        }
        throw std::runtime_error(err(line_no, "cannot parse value: " + v));
    }

    static Value parse_value(const std::string& v, std::size_t line_no) {
        if (v.front() != '[') return parse_scalar(v, line_no);
        if (v.back() != ']') throw std::runtime_error(err(line_no, "unterminated array"));
        const std::string inner(trim(v.substr(1, v.size() - 2)));
        std::vector<std::string> parts;
        // split on commas outside quotes
        std::string cur;
        bool in_string = false;
        for (char c : inner) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                parts.emplace_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!trim(cur).empty()) parts.emplace_back(trim(cur));
        std::vector<std::string> strings;
        std::vector<double> numbers;
        bool any_string = false, any_number = false;
        for (const auto& p : parts) {
            Value sv = parse_scalar(p, line_no);
            if (const auto* s = std::get_if<std::string>(&sv)) {
                strings.push_back(*s);
                any_string = true;
            } else if (const auto* d = std::get_if<double>(&sv)) {
                numbers.push_back(*d);
                any_number = true;
            } else if (const auto* i = std::get_if<std::int64_t>(&sv)) {
                numbers.push_back(static_cast<double>(*i));
                any_number = true;
            } else {
                throw std::runtime_error(err(line_no, "unsupported array element"));
            }
        }
        if (any_string && any_number) {
            throw std::runtime_error(err(line_no, "mixed array types"));
        }
        if (any_string) return strings;
        return numbers;
    }

    std::map<std::string, Value> values_;
};

struct PipelineConfig {
    std::string config_path;

    // run
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    Date study_start;
    Date study_end;  // inclusive in the config, half-open internally

    // ingest
    std::string tweets_path;
    std::string tweets_format = "jsonl";
    std::string cases_path;
    std::string gazetteer_path;
    std::string regions_path;
    bool strict = false;
    std::map<std::string, Date> zero_fill_before;

    // epi
    epi::RtGrid grid;
    double sigma_rw = 0.15;
    double serial_interval = 7.0;
    int smooth_window = 7;
    double smooth_sigma = 2.0;
    double interval_mass = 0.9;
    double r0_min = 1.4;
    double r0_max = 2.5;

    // corr
    int lag_min = -10;
    int lag_max = 5;

    // textprep
    std::string stopwords_dir;
    bool spell_correct = false;
    std::string dictionary_path;
    bool pos_filter = false;
    std::string pos_lexicon_path;
    bool stem = false;

    // topics
    topics::CteParams cte;
    std::size_t min_docs_per_day = 5;
    bool tune = false;
    std::size_t tune_k_min = 1;
    std::size_t tune_k_max = 15;
    std::vector<double> tune_gamma_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::string embedding_mode = "hashed";
    std::string embedding_file;

    // classify
    std::string labeled_topics_path;
    classify::CountryEncoding country_encoding = classify::CountryEncoding::onehot;
    classify::TrainConfig train;

    // report
    std::string plot_region = "GR";

    DateInterval study_window() const { return {study_start, study_end + 1}; }
};

inline std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

inline Date parse_date_or_throw(const std::string& s, const std::string& what) {
    auto d = Date::parse(s);
    if (!d) throw std::runtime_error("invalid date for " + what + ": " + s);
    return *d;
}

// Loads the TOML file and resolves every relative path against the config
// file's directory. The optional env seed is the lowest-priority source.
inline PipelineConfig load_config(const std::string& path) {
    Toml t = Toml::parse_file(path);
    const std::string base = std::filesystem::path(path).parent_path().string();
    PipelineConfig c;
    c.config_path = path;

    std::uint64_t env_seed = 0;
    if (const char* env = std::getenv("EPISIGNAL_SEED")) {
        env_seed = static_cast<std::uint64_t>(std::stoull(env));
    }
    c.seed = static_cast<std::uint64_t>(
        t.get_int("run.seed", static_cast<std::int64_t>(env_seed)));
    c.out_dir = t.get_string("run.out_dir", "out");
    c.study_start = parse_date_or_throw(t.get_string("run.study_start", "2020-01-22"),
                                        "run.study_start");
    c.study_end = parse_date_or_throw(t.get_string("run.study_end", "2020-06-05"),
                                      "run.study_end");
    if (c.study_end < c.study_start) throw std::runtime_error("study window is empty");

    c.tweets_path = resolve_path(base, t.get_string("ingest.tweets", ""));
    c.tweets_format = t.get_string("ingest.tweets_format", "jsonl");
    if (c.tweets_format != "jsonl" && c.tweets_format != "csv") {
        throw std::runtime_error("ingest.tweets_format must be jsonl or csv");
    }
    c.cases_path = resolve_path(base, t.get_string("ingest.cases", ""));
    c.gazetteer_path = resolve_path(base, t.get_string("ingest.gazetteer", ""));
    c.regions_path = resolve_path(base, t.get_string("ingest.regions", ""));
    c.strict = t.get_bool("ingest.strict", false);
    for (const auto& entry : t.get_string_array("ingest.zero_fill", {})) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("ingest.zero_fill entries must look like 'member=date'");
        }
        const std::string member(trim(entry.substr(0, eq)));
        c.zero_fill_before[member] =
            parse_date_or_throw(std::string(trim(entry.substr(eq + 1))), "ingest.zero_fill");
    }

    c.grid.r_min = t.get_double("epi.grid_min", 0.0);
    c.grid.r_max = t.get_double("epi.grid_max", 6.0);
    c.grid.step = t.get_double("epi.grid_step", 0.01);
    c.sigma_rw = t.get_double("epi.sigma_rw", 0.15);
    c.serial_interval = t.get_double("epi.serial_interval", 7.0);
    c.smooth_window = static_cast<int>(t.get_int("epi.smooth_window", 7));
    c.smooth_sigma = t.get_double("epi.smooth_sigma", 2.0);
    c.interval_mass = t.get_double("epi.interval_mass", 0.9);
    c.r0_min = t.get_double("epi.r0_min", 1.4);
    c.r0_max = t.get_double("epi.r0_max", 2.5);

    c.lag_min = static_cast<int>(t.get_int("corr.lag_min", -10));
    c.lag_max = static_cast<int>(t.get_int("corr.lag_max", 5));

    c.stopwords_dir = resolve_path(base, t.get_string("textprep.stopwords_dir", ""));
    c.spell_correct = t.get_bool("textprep.spell_correct", false);
    c.dictionary_path = resolve_path(base, t.get_string("textprep.dictionary", ""));
    c.pos_filter = t.get_bool("textprep.pos_filter", false);
    c.pos_lexicon_path = resolve_path(base, t.get_string("textprep.pos_lexicon", ""));
    c.stem = t.get_bool("textprep.stem", false);

    c.cte.k = static_cast<std::size_t>(t.get_int("topics.k", 7));
    c.cte.gamma = t.get_double("topics.gamma", 0.5);
    c.cte.lda.alpha = t.get_double("topics.lda_alpha", -1.0);
    c.cte.lda.beta = t.get_double("topics.lda_beta", 0.01);
    c.cte.lda.iterations = static_cast<int>(t.get_int("topics.lda_iterations", 500));
    c.cte.lda.quantization = static_cast<int>(t.get_int("topics.lda_quantization", 10));
    c.cte.embedding_dim = static_cast<std::size_t>(t.get_int("topics.embedding_dim", 64));
    c.cte.autoencoder.latent_dim = static_cast<std::size_t>(t.get_int("topics.latent_dim", 32));
    c.cte.autoencoder.hidden_dim = static_cast<std::size_t>(t.get_int("topics.hidden_dim", 0));
    c.cte.autoencoder.epochs = static_cast<int>(t.get_int("topics.epochs", 200));
    c.cte.autoencoder.learning_rate = t.get_double("topics.learning_rate", 1e-3);
    c.cte.kmeans_max_iters = static_cast<int>(t.get_int("topics.kmeans_max_iters", 300));
    c.cte.kmeans_tol = t.get_double("topics.kmeans_tol", 1e-6);
    c.min_docs_per_day = static_cast<std::size_t>(t.get_int("topics.min_docs_per_day", 5));
    c.tune = t.get_bool("topics.tune", false);
    c.tune_k_min = static_cast<std::size_t>(t.get_int("topics.tune_k_min", 1));
    c.tune_k_max = static_cast<std::size_t>(t.get_int("topics.tune_k_max", 15));
    c.tune_gamma_grid = t.get_double_array("topics.tune_gamma_grid", c.tune_gamma_grid);
    c.embedding_mode = t.get_string("topics.embedding_mode", "hashed");
    if (c.embedding_mode != "hashed" && c.embedding_mode != "precomputed") {
        throw std::runtime_error("topics.embedding_mode must be hashed or precomputed");
    }
    c.embedding_file = resolve_path(base, t.get_string("topics.embedding_file", ""));

    c.labeled_topics_path = resolve_path(base, t.get_string("classify.labeled_topics", ""));
    const std::string enc = t.get_string("classify.country_encoding", "onehot");
    if (enc == "onehot") c.country_encoding = classify::CountryEncoding::onehot;
    else if (enc == "integer") c.country_encoding = classify::CountryEncoding::integer;
    else throw std::runtime_error("classify.country_encoding must be onehot or integer");
    c.train.folds = static_cast<int>(t.get_int("classify.folds", 10));
    c.train.test_fraction = t.get_double("classify.test_fraction", 0.2);
    c.train.smote_k = static_cast<int>(t.get_int("classify.smote_k", 5));
    c.train.c_grid = t.get_double_array("classify.c_grid", c.train.c_grid);
    c.train.rbf_gamma_grid = t.get_double_array("classify.rbf_gamma_grid", c.train.rbf_gamma_grid);
    const auto kernels = t.get_string_array("classify.kernels", {"linear", "rbf"});
    c.train.kernel_grid.clear();
    for (const auto& k : kernels) {
        if (k == "linear") c.train.kernel_grid.push_back(classify::KernelType::linear);
        else if (k == "rbf") c.train.kernel_grid.push_back(classify::KernelType::rbf);
        else throw std::runtime_error("classify.kernels entries must be linear or rbf");
    }

    c.plot_region = t.get_string("report.plot_region", "GR");
    return c;
}

// Full resolved snapshot, embedded in the run manifest.
inline nlohmann::json config_snapshot(const PipelineConfig& c) {
    nlohmann::json j;
    j["run"] = {{"seed", c.seed},
                {"study_start", c.study_start.to_iso()},
                {"study_end", c.study_end.to_iso()}};
    nlohmann::json zf = nlohmann::json::object();
    for (const auto& [member, date] : c.zero_fill_before) zf[member] = date.to_iso();
    j["ingest"] = {{"tweets", c.tweets_path},       {"tweets_format", c.tweets_format},
                   {"cases", c.cases_path},         {"gazetteer", c.gazetteer_path},
                   {"regions", c.regions_path},     {"strict", c.strict},
                   {"zero_fill_before", zf}};
    j["epi"] = {{"grid_min", c.grid.r_min},
                {"grid_max", c.grid.r_max},
                {"grid_step", c.grid.step},
                {"sigma_rw", c.sigma_rw},
                {"serial_interval", c.serial_interval},
                {"smooth_window", c.smooth_window},
                {"smooth_sigma", c.smooth_sigma},
                {"interval_mass", c.interval_mass},
                {"r0_min", c.r0_min},
                {"r0_max", c.r0_max}};
    j["corr"] = {{"lag_min", c.lag_min}, {"lag_max", c.lag_max}};
    j["textprep"] = {{"stopwords_dir", c.stopwords_dir},
                     {"spell_correct", c.spell_correct},
                     {"dictionary", c.dictionary_path},
                     {"pos_filter", c.pos_filter},
                     {"pos_lexicon", c.pos_lexicon_path},
                     {"stem", c.stem}};
    j["topics"] = {{"k", c.cte.k},
                   {"gamma", c.cte.gamma},
                   {"lda_alpha", c.cte.lda.alpha},
                   {"lda_beta", c.cte.lda.beta},
                   {"lda_iterations", c.cte.lda.iterations},
                   {"lda_quantization", c.cte.lda.quantization},
                   {"embedding_mode", c.embedding_mode},
                   {"embedding_file", c.embedding_file},
                   {"embedding_dim", c.cte.embedding_dim},
                   {"latent_dim", c.cte.autoencoder.latent_dim},
                   {"hidden_dim", c.cte.autoencoder.hidden_dim},
                   {"epochs", c.cte.autoencoder.epochs},
                   {"learning_rate", c.cte.autoencoder.learning_rate},
                   {"kmeans_max_iters", c.cte.kmeans_max_iters},
                   {"kmeans_tol", c.cte.kmeans_tol},
                   {"min_docs_per_day", c.min_docs_per_day},
                   {"tune", c.tune},
                   {"tune_k_min", c.tune_k_min},
                   {"tune_k_max", c.tune_k_max},
                   {"tune_gamma_grid", c.tune_gamma_grid}};
    std::vector<std::string> kernels;
    for (auto k : c.train.kernel_grid) kernels.push_back(classify::kernel_name(k));
    j["classify"] = {{"labeled_topics", c.labeled_topics_path},
                     {"country_encoding",
                      c.country_encoding == classify::CountryEncoding::onehot ? "onehot"
                                                                              : "integer"},
                     {"folds", c.train.folds},
                     {"test_fraction", c.train.test_fraction},
                     {"smote_k", c.train.smote_k},
                     {"c_grid", c.train.c_grid},
                     {"rbf_gamma_grid", c.train.rbf_gamma_grid},
                     {"kernels", kernels}};
    j["report"] = {{"plot_region", c.plot_region}};
    return j;
}

}  // namespace episignal::config
