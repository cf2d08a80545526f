// hubshift: detects dining hubs, home/work locations and job/housing moves
// from delivery-order logs, with a synthetic-city generator for validation.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hubshift/errors.hpp"
#include "hubshift/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
};

hubshift::pipeline::PipelineConfig load_config(const GlobalOptions& opts) {
    using hubshift::pipeline::PipelineConfig;
    PipelineConfig cfg =
        opts.config_path.empty() ? PipelineConfig{} : PipelineConfig::load(opts.config_path);
    if (opts.workers) cfg.workers = *opts.workers;
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.classifier.seed = *opts.seed;
        if (cfg.scenario) cfg.scenario->seed = *opts.seed;
    }
    cfg.validate();
    return cfg;
}

void add_global_flags(CLI::App* cmd, GlobalOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Pipeline config JSON");
    cmd->add_option("--out-dir", opts.out_dir, "Output directory (default: out)");
    cmd->add_option("--workers", opts.workers, "Worker thread count");
    cmd->add_option("--seed", opts.seed, "Seed override for every stage");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dining-hub detection and job/housing mobility analysis"};
    app.require_subcommand(1);

    GlobalOptions opts;
    std::optional<double> match_radius;
    std::optional<int> month_slack;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic order log + ground truth");
    auto* detect = app.add_subcommand("detect", "Detect hubs, labels, moves and user groups");
    auto* analyze = app.add_subcommand("analyze", "Aggregate statistics and reports");
    auto* evaluate = app.add_subcommand("evaluate", "Score detection against ground truth");
    auto* run_all = app.add_subcommand("run-all", "synth + detect + analyze + evaluate");
    for (auto* cmd : {synth, detect, analyze, evaluate, run_all}) add_global_flags(cmd, opts);
    evaluate->add_option("--match-radius-km", match_radius, "Endpoint match radius");
    evaluate->add_option("--month-slack", month_slack, "Allowed move-month difference");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const auto cfg = load_config(opts);
        std::vector<std::string> lines;
        if (synth->parsed())
            lines = hubshift::pipeline::cmd_synth(cfg, opts.out_dir);
        else if (detect->parsed())
            lines = hubshift::pipeline::cmd_detect(cfg, opts.out_dir);
        else if (analyze->parsed())
            lines = hubshift::pipeline::cmd_analyze(cfg, opts.out_dir);
        else if (evaluate->parsed())
            lines = hubshift::pipeline::cmd_evaluate(cfg, opts.out_dir, match_radius, month_slack);
        else if (run_all->parsed())
            lines = hubshift::pipeline::cmd_run_all(cfg, opts.out_dir);
        for (const auto& line : lines) std::cout << line << '\n';
        return kExitOk;
    } catch (const hubshift::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const hubshift::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
