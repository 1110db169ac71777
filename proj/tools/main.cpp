#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "amsim/runner.hpp"

namespace {

// Exit codes: 0 success, 1 config error, 2 data error, 3 runtime failure.
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    cmd->add_option("--config", opts.config_path, "experiment config file")
        ->required(config_required);
    cmd->add_option("--seed", opts.seed, "override the global seed");
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--threads", opts.threads, "worker threads for sweep cells");
}

int execute(const CommonOpts& opts, std::optional<amsim::ExperimentKind> kind_override) {
    try {
        amsim::ExperimentConfig cfg = amsim::load_config_file(opts.config_path);
        if (kind_override) cfg.experiment = *kind_override;
        if (opts.seed) cfg.seed = *opts.seed;
        if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
        if (opts.threads) cfg.threads = *opts.threads;
        amsim::run_experiment(cfg);
        std::cout << "wrote " << cfg.out_dir << "/results.csv\n";
        return 0;
    } catch (const amsim::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const amsim::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memristor Hopfield associative memory simulator"};
    app.set_version_flag("--version", amsim::kToolVersion);
    app.require_subcommand(1);

    CommonOpts opts;

    auto* run = app.add_subcommand("run", "run the experiment named in the config");
    add_common(run, opts);

    auto* validate = app.add_subcommand("validate", "parse and validate a config, print it resolved");
    add_common(validate, opts);

    // Figure-family shortcuts: same pipeline, experiment kind forced.
    auto* demo = app.add_subcommand("demo", "store patterns and retrieve from corrupted cues");
    add_common(demo, opts);
    auto* capacity = app.add_subcommand("capacity", "pattern-capacity sweep");
    add_common(capacity, opts);
    auto* scaling = app.add_subcommand("scaling", "capacity-vs-size sweep with exponent fit");
    add_common(scaling, opts);
    auto* faults = app.add_subcommand("faults", "stuck-at-fault tolerance sweep");
    add_common(faults, opts);
    auto* cost = app.add_subcommand("cost", "energy/latency model comparison");
    add_common(cost, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help/--version exit 0; any usage error folds into the config code.
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    if (validate->parsed()) {
        try {
            amsim::ExperimentConfig cfg = amsim::load_config_file(opts.config_path);
            std::cout << cfg.to_text();
            return 0;
        } catch (const amsim::ConfigError& e) {
            std::cerr << e.what() << '\n';
            return kExitConfig;
        }
    }

    std::optional<amsim::ExperimentKind> kind;
    if (demo->parsed()) kind = amsim::ExperimentKind::Retrieve;
    if (capacity->parsed()) kind = amsim::ExperimentKind::Capacity;
    if (scaling->parsed()) kind = amsim::ExperimentKind::ScalingSweep;
    if (faults->parsed()) kind = amsim::ExperimentKind::FaultSweep;
    if (cost->parsed()) kind = amsim::ExperimentKind::CostCompare;
    return execute(opts, kind);
}
