// Command-line front end: one subcommand per pipeline stage plus `pipeline`
// for the whole run. Exit codes: 0 success, 1 validation error, 2 runtime
// error. All diagnostics go to stderr.

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "episignal/pipeline.hpp"

namespace {

using episignal::config::PipelineConfig;
using episignal::pipeline::StageOptions;
using episignal::pipeline::ValidationError;

using StageFn = void (*)(const PipelineConfig&, const StageOptions&);

const std::map<std::string, std::pair<StageFn, const char*>>& stages() {
    static const std::map<std::string, std::pair<StageFn, const char*>> table = {
        {"ingest", {&episignal::pipeline::run_ingest,
                    "load tweets and cases, normalize locations, aggregate regions"}},
        {"rt", {&episignal::pipeline::run_rt, "estimate R(t) per region"}},
        {"periods", {&episignal::pipeline::run_periods,
                     "slice R(t) trajectories into pandemic periods"}},
        {"correlate", {&episignal::pipeline::run_correlate,
                       "lagged correlations between tweet volume and cases"}},
        {"topics", {&episignal::pipeline::run_topics, "daily CTE topic extraction"}},
        {"classify", {&episignal::pipeline::run_classify,
                      "train the category classifier and label extracted topics"}},
        {"report", {&episignal::pipeline::run_report, "emit report artifacts"}},
        {"pipeline", {&episignal::pipeline::run_pipeline, "run every stage in order"}},
    };
    return table;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"episignal: pandemic social-media signal pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string region;
    std::optional<std::uint64_t> seed_override;
    bool strict = false;
    bool parallel = false;

    std::string chosen;
    for (const auto& [name, entry] : stages()) {
        auto* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--config", config_path, "TOML configuration file")
            ->required();
        sub->add_option("--out-dir", out_dir, "output directory (default from config)");
        sub->add_option("--region", region, "restrict the run to one region");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { seed_override = v; },
            "override the configured master seed");
        sub->add_flag("--strict", strict, "abort on the first malformed input record");
        sub->add_flag("--parallel", parallel, "run per-region work on threads");
        sub->callback([&chosen, name = name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    PipelineConfig cfg;
    StageOptions opts;
    try {
        cfg = episignal::config::load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (strict) cfg.strict = true;
        opts.out_dir = out_dir.empty() ? cfg.out_dir : out_dir;
        if (!region.empty()) opts.region_filter = region;
        opts.parallel = parallel;
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    }

    try {
        stages().at(chosen).first(cfg, opts);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
