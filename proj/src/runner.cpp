#include "amsim/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "amsim/rng.hpp"

namespace amsim {

namespace {

namespace fs = std::filesystem;

std::string experiment_id(const ExperimentConfig& cfg) {
    return to_string(cfg.experiment) + "-" + std::to_string(cfg.seed);
}

// Serialized CSV writer with the shared result schema.
class ResultWriter {
public:
    ResultWriter(const fs::path& path) : os_(path) {
        if (!os_) throw std::runtime_error("cannot open output file: " + path.string());
        os_ << "experiment_id,rule,N,N_h,pattern_count,repeat,pattern_id,similarity,iterations,"
               "converged\n";
    }

    void row(const std::string& id, const std::string& rule, int n, int nh, int count, int repeat,
             int pattern, double similarity, int iterations, bool converged) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", similarity);
        os_ << id << ',' << rule << ',' << n << ',' << nh << ',' << count << ',' << repeat << ','
            << pattern << ',' << buf << ',' << iterations << ',' << (converged ? 1 : 0) << '\n';
    }

private:
    std::ofstream os_;
};

struct DatasetHandle {
    std::vector<ImageGrid> grids;  // empty for random source
};

DatasetHandle open_dataset(const ExperimentConfig& cfg) {
    DatasetHandle h;
    if (cfg.dataset.source == DataSource::MnistIdx)
        h.grids = load_mnist(cfg.dataset.images_path, cfg.dataset.labels_path);
    return h;
}

PatternSet draw_patterns(const ExperimentConfig& cfg, const DatasetHandle& data, int side,
                         int count, bool per_digit, std::uint64_t seed) {
    if (cfg.dataset.source == DataSource::Random)
        return gen_random_patterns(count, side * side, cfg.dataset.kind, seed);
    DatasetSpec spec = cfg.dataset;
    spec.target_side = side;
    spec.count = count;
    spec.per_digit = per_digit;
    spec.seed = seed;
    return select_patterns(data.grids, spec);
}

FaultMask make_fault_mask(int rows, int cols, double fraction, std::uint64_t seed) {
    CrossbarPair blank;
    blank.g_plus = Eigen::MatrixXd::Zero(rows, cols);
    blank.g_minus = Eigen::MatrixXd::Zero(rows, cols);
    blank.stuck.setConstant(rows, cols, false);
    return inject_faults(blank, fraction, seed).second;
}

// Maps a trained weight matrix through the emulated crossbar (programming
// noise, stuck cells) and returns the weights the hardware realises.
Eigen::MatrixXd through_crossbar(const Eigen::MatrixXd& w, const ExperimentConfig& cfg,
                                 const FaultMask* mask, std::uint64_t seed,
                                 CrossbarPair* snapshot = nullptr) {
    CrossbarConfig xcfg = cfg.crossbar;
    xcfg.seed = seed;
    CrossbarPair pair = map_weights(w, xcfg);
    if (mask && !mask->empty()) {
        pair.stuck = mask->stuck;
        pair.g_plus = mask->stuck.select(0.0, pair.g_plus);
        pair.g_minus = mask->stuck.select(0.0, pair.g_minus);
    }
    if (cfg.crossbar_program_noise) pair = program(pair, xcfg);
    if (snapshot) *snapshot = pair;
    return read_weights(pair);
}

struct TrainedNet {
    AnyNet net;
    TrainingReport report;
};

// Train with the configured rule, honoring fault masks and the optional
// crossbar emulation stage.
TrainedNet train_and_realize(const ExperimentConfig& cfg, LearningRule rule,
                             const PatternSet& patterns, std::uint64_t seed,
                             std::vector<std::pair<std::string, CrossbarPair>>* snapshots =
                                 nullptr) {
    const int n = static_cast<int>(patterns.front().size());
    const int nh = cfg.resolved_hidden_dim();
    const double frac = cfg.crossbar.stuck_fraction;

    TrainedNet out;
    TrainingConfig tcfg =
        cfg.training_overridden ? cfg.training
        : rule == LearningRule::AdaptiveMulti ? TrainingConfig::multilayer()
                                              : TrainingConfig::single_layer();
    tcfg.seed = derive_seed(seed, "train-init");

    switch (rule) {
        case LearningRule::Hebbian:
            out.net = train_hebbian(patterns);
            break;
        case LearningRule::Storkey:
            out.net = train_storkey(patterns);
            break;
        case LearningRule::PseudoInverse:
            out.net = train_pseudo_inverse(patterns);
            break;
        case LearningRule::AdaptiveSingle: {
            std::optional<FaultMask> mask;
            if (frac > 0.0)
                mask = make_fault_mask(n, n, frac, derive_seed(seed, "faults"));
            auto [net, report] = train_adaptive_single(patterns, tcfg, mask);
            out.net = std::move(net);
            out.report = std::move(report);
            break;
        }
        case LearningRule::AdaptiveMulti: {
            std::optional<MultilayerFaultMask> masks;
            if (frac > 0.0)
                masks = MultilayerFaultMask{
                    make_fault_mask(nh, n, frac, derive_seed(seed, "faults-encoder")),
                    make_fault_mask(n, nh, frac, derive_seed(seed, "faults-decoder"))};
            auto [net, report] = train_adaptive_multilayer(patterns, nh, tcfg, masks);
            out.net = std::move(net);
            out.report = std::move(report);
            break;
        }
    }

    if (!cfg.crossbar_emulated) return out;

    // Deploy through the emulated hardware; the realized weights replace the
    // trained ones. Faults hit classical rules post-hoc here, matching a
    // hardware-unaware deployment.
    if (auto* single = std::get_if<HopfieldNet>(&out.net)) {
        std::optional<FaultMask> mask;
        if (frac > 0.0) mask = make_fault_mask(n, n, frac, derive_seed(seed, "faults"));
        CrossbarPair snap;
        single->weights = through_crossbar(single->weights, cfg, mask ? &*mask : nullptr,
                                           derive_seed(seed, "program"), &snap);
        if (snapshots) snapshots->emplace_back("weights", std::move(snap));
    } else {
        auto& multi = std::get<MultilayerNet>(out.net);
        std::optional<FaultMask> emask, dmask;
        if (frac > 0.0) {
            emask = make_fault_mask(nh, n, frac, derive_seed(seed, "faults-encoder"));
            dmask = make_fault_mask(n, nh, frac, derive_seed(seed, "faults-decoder"));
        }
        CrossbarPair se, sd;
        multi.encoder = through_crossbar(multi.encoder, cfg, emask ? &*emask : nullptr,
                                         derive_seed(seed, "program-encoder"), &se);
        multi.decoder = through_crossbar(multi.decoder, cfg, dmask ? &*dmask : nullptr,
                                         derive_seed(seed, "program-decoder"), &sd);
        if (snapshots) {
            snapshots->emplace_back("encoder", std::move(se));
            snapshots->emplace_back("decoder", std::move(sd));
        }
    }
    return out;
}

RetrievalConfig retrieval_for(const ExperimentConfig& cfg) {
    RetrievalConfig r = cfg.retrieval;
    r.activation =
        cfg.dataset.kind == PatternKind::Binary ? Activation::Sign : Activation::Tanh;
    r.seed = derive_seed(cfg.seed, "retrieve");
    return r;
}

void write_similarity_rows(ResultWriter& w, const std::string& id, const std::string& rule,
                           int n, int nh, int count, const SimilaritySummary& sim,
                           std::size_t patterns) {
    for (std::size_t k = 0; k < sim.raw.size(); ++k)
        w.row(id, rule, n, nh, count, static_cast<int>(k / patterns),
              static_cast<int>(k % patterns), sim.raw[k], sim.iterations[k],
              sim.converged[k]);
}

void dump_snapshots(const ExperimentConfig& cfg,
                    const std::vector<std::pair<std::string, CrossbarPair>>& snaps) {
    if (!cfg.export_conductance) return;
    for (const auto& [name, pair] : snaps) {
        std::ofstream os(fs::path(cfg.out_dir) / ("conductance_" + name + ".csv"));
        write_conductance_csv(os, pair);
    }
}

Trainer make_trainer(const ExperimentConfig& cfg, LearningRule rule) {
    return [&cfg, rule](const PatternSet& set, std::uint64_t seed) {
        return train_and_realize(cfg, rule, set, seed).net;
    };
}

void run_store(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out);
void run_retrieve(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out);
void run_capacity(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out);
void run_faults(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out);
void run_scaling(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out);
void run_cost(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out);

void run_store(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out) {
    PatternSet patterns =
        draw_patterns(cfg, data, cfg.dataset.target_side, cfg.dataset.count,
                      cfg.dataset.per_digit, derive_seed(cfg.seed, "data"));
    std::vector<std::pair<std::string, CrossbarPair>> snaps;
    TrainedNet trained =
        train_and_realize(cfg, cfg.rule, patterns, derive_seed(cfg.seed, "train"), &snaps);
    dump_snapshots(cfg, snaps);

    // Verify each stored pattern retrieves from an uncorrupted cue.
    RetrievalConfig rcfg = retrieval_for(cfg);
    const int n = static_cast<int>(patterns.front().size());
    const int nh = std::holds_alternative<MultilayerNet>(trained.net) ? cfg.resolved_hidden_dim() : 0;
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        RetrievalTrace trace = retrieve(trained.net, patterns[p], rcfg);
        out.row(experiment_id(cfg), to_string(cfg.rule), n, nh,
                static_cast<int>(patterns.size()), 0, static_cast<int>(p),
                cosine_similarity(trace.final_state(), patterns[p]), trace.iterations_used,
                trace.converged || trace.cycle_detected);
    }
}

void run_retrieve(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out) {
    PatternSet patterns =
        draw_patterns(cfg, data, cfg.dataset.target_side, cfg.dataset.count,
                      cfg.dataset.per_digit, derive_seed(cfg.seed, "data"));
    std::vector<std::pair<std::string, CrossbarPair>> snaps;
    TrainedNet trained =
        train_and_realize(cfg, cfg.rule, patterns, derive_seed(cfg.seed, "train"), &snaps);
    dump_snapshots(cfg, snaps);

    SimilaritySummary sim =
        retrieval_similarity(trained.net, patterns, cfg.corruption, cfg.capacity.repeats,
                             retrieval_for(cfg), derive_seed(cfg.seed, "eval"));
    const int n = static_cast<int>(patterns.front().size());
    const int nh = std::holds_alternative<MultilayerNet>(trained.net) ? cfg.resolved_hidden_dim() : 0;
    write_similarity_rows(out, experiment_id(cfg), to_string(cfg.rule), n, nh,
                          static_cast<int>(patterns.size()), sim, patterns.size());
}

void write_capacity_rows(const ExperimentConfig& cfg, ResultWriter& out, const std::string& rule,
                         int n, int nh, const CapacityResult& result) {
    for (const auto& point : result.curve) {
        // Aggregate row: repeat -1, pattern -1, mean similarity.
        out.row(experiment_id(cfg), rule, n, nh, point.pattern_count, -1, -1,
                point.trainer_failed ? -1.0 : point.mean_similarity, 0, !point.trainer_failed);
        if (!point.trainer_failed)
            write_similarity_rows(out, experiment_id(cfg), rule, n, nh, point.pattern_count,
                                  point.detail,
                                  static_cast<std::size_t>(point.pattern_count));
    }
    // Capacity row: pattern_count 0 carries the final capacity in `similarity`.
    out.row(experiment_id(cfg), rule, n, nh, 0, -1, -1, result.capacity, 0, true);
}

CapacityResult capacity_for(const ExperimentConfig& cfg, const DatasetHandle& data,
                            LearningRule rule, int side, std::uint64_t seed) {
    const int n = side * side;
    CapacitySpec spec = cfg.capacity;
    spec.seed = seed;
    if (cfg.capacity.pattern_step == 0) spec.pattern_step = std::max(1, n / 32);
    if (cfg.capacity.max_patterns == 0) spec.max_patterns = 2 * n;

    PatternProvider provider = [&cfg, &data, side](int count, std::uint64_t s) {
        return draw_patterns(cfg, data, side, count, false, s);
    };
    return measure_capacity(make_trainer(cfg, rule), provider, retrieval_for(cfg), spec);
}

void run_capacity(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out) {
    const int side = cfg.dataset.target_side;
    CapacityResult result =
        capacity_for(cfg, data, cfg.rule, side, derive_seed(cfg.seed, "capacity"));
    const int nh = cfg.rule == LearningRule::AdaptiveMulti ? cfg.resolved_hidden_dim() : 0;
    write_capacity_rows(cfg, out, to_string(cfg.rule), side * side, nh, result);
}

void run_faults(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out) {
    PatternSet patterns =
        draw_patterns(cfg, data, cfg.dataset.target_side, cfg.dataset.count,
                      cfg.dataset.per_digit, derive_seed(cfg.seed, "data"));
    const int n = static_cast<int>(patterns.front().size());
    RetrievalConfig rcfg = retrieval_for(cfg);

    for (double fraction : cfg.fault_fractions) {
        ExperimentConfig sub = cfg;
        sub.crossbar.stuck_fraction = fraction;
        const std::uint64_t seed =
            derive_seed(cfg.seed, "fault-sweep", static_cast<std::uint64_t>(fraction * 1000));

        // Mask-aware adaptive training.
        TrainedNet adaptive = train_and_realize(sub, LearningRule::AdaptiveSingle, patterns, seed);
        SimilaritySummary sim_a =
            retrieval_similarity(adaptive.net, patterns, cfg.corruption, cfg.capacity.repeats,
                                 rcfg, derive_seed(seed, "eval-adaptive"));
        write_similarity_rows(out, experiment_id(cfg) + "-f" + std::to_string(fraction),
                              "adaptive_single", n, 0, static_cast<int>(patterns.size()), sim_a,
                              patterns.size());

        // Hardware-unaware baseline: pseudo-inverse weights, faults zeroed post-hoc.
        HopfieldNet baseline = train_pseudo_inverse(patterns);
        FaultMask mask = make_fault_mask(n, n, fraction, derive_seed(seed, "faults"));
        mask.apply(baseline.weights);
        SimilaritySummary sim_b =
            retrieval_similarity(baseline, patterns, cfg.corruption, cfg.capacity.repeats, rcfg,
                                 derive_seed(seed, "eval-baseline"));
        write_similarity_rows(out, experiment_id(cfg) + "-f" + std::to_string(fraction),
                              "pseudo_inverse_posthoc", n, 0, static_cast<int>(patterns.size()),
                              sim_b, patterns.size());
    }
}

void run_scaling(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out) {
    const auto& sides = cfg.scaling_sides;
    std::vector<CapacityResult> results(sides.size());

    // Independent sweep cells; merged by index below, never by completion order.
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            results[i] = capacity_for(cfg, data, cfg.rule, sides[i],
                                      derive_seed(cfg.seed, "scaling", sides[i]));
    };
    if (cfg.threads <= 1 || sides.size() <= 1) {
        work(0, sides.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t per = (sides.size() + cfg.threads - 1) / cfg.threads;
        for (std::size_t lo = 0; lo < sides.size(); lo += per)
            pool.emplace_back(work, lo, std::min(lo + per, sides.size()));
        for (auto& t : pool) t.join();
    }

    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        const int n = sides[i] * sides[i];
        const int nh = cfg.rule == LearningRule::AdaptiveMulti ? n / 2 : 0;
        write_capacity_rows(cfg, out, to_string(cfg.rule), n, nh, results[i]);
        if (results[i].capacity > 0) points.emplace_back(n, results[i].capacity);
    }

    std::ofstream fit_os(fs::path(cfg.out_dir) / "scaling_fit.csv");
    fit_os << "experiment_id,rule,exponent,intercept,r_squared,points\n";
    if (points.size() >= 2) {
        ScalingFit fit = fit_scaling_exponent(points);
        fit_os << experiment_id(cfg) << ',' << to_string(cfg.rule) << ',' << fit.exponent << ','
               << fit.intercept << ',' << fit.r_squared << ',' << points.size() << '\n';
    }
}

void run_cost(const ExperimentConfig& cfg, const DatasetHandle& data, ResultWriter& out) {
    PatternSet patterns =
        draw_patterns(cfg, data, cfg.dataset.target_side, cfg.dataset.count,
                      cfg.dataset.per_digit, derive_seed(cfg.seed, "data"));
    const int n = static_cast<int>(patterns.front().size());
    const int nh = cfg.resolved_hidden_dim();
    RetrievalConfig rcfg = retrieval_for(cfg);

    auto measure = [&](LearningRule rule) {
        TrainedNet trained =
            train_and_realize(cfg, rule, patterns, derive_seed(cfg.seed, "train"));
        std::vector<RetrievalTrace> traces;
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            Pattern corrupted =
                cfg.corruption.kind == CorruptionKind::Flip
                    ? corrupt_flip(patterns[p], cfg.corruption.flip_prob,
                                   derive_seed(cfg.seed, "cost-corrupt", p))
                    : corrupt_gaussian(patterns[p], cfg.corruption.sigma,
                                       derive_seed(cfg.seed, "cost-corrupt", p));
            traces.push_back(retrieve(trained.net, corrupted, rcfg));
        }
        return iteration_counts_from_traces(traces);
    };

    IterationStats single = measure(LearningRule::AdaptiveSingle);
    IterationStats multi = measure(LearningRule::AdaptiveMulti);
    const int iters_single = std::max(1, static_cast<int>(std::ceil(single.mean)));
    const int iters_multi = std::max(1, static_cast<int>(std::ceil(multi.mean)));

    CostReport sync = cost_sync_single(n, iters_single, cfg.cost);
    CostReport async = cost_async_single(n, iters_single, cfg.cost);
    CostReport ml = cost_multilayer(n, nh, iters_multi, cfg.cost);

    std::ofstream os(fs::path(cfg.out_dir) / "cost.csv");
    os << "experiment_id,variant,N,N_h,patterns,iterations,mvm_energy_j,adc_energy_j,"
          "dac_energy_j,total_energy_j,total_latency_s\n";
    auto emit = [&](const std::string& variant, int nhv, const CostReport& r) {
        os << experiment_id(cfg) << ',' << variant << ',' << n << ',' << nhv << ','
           << patterns.size() << ',' << r.iterations << ',' << r.mvm_energy_j << ','
           << r.adc_energy_j << ',' << r.dac_energy_j << ',' << r.total_energy_j << ','
           << r.total_latency_s << '\n';
    };
    emit("sync_single", 0, sync);
    emit("async_single", 0, async);
    emit("multilayer", nh, ml);

    out.row(experiment_id(cfg), "adaptive_single", n, 0, static_cast<int>(patterns.size()), -1,
            -1, single.mean, single.max, single.non_converged == 0);
    out.row(experiment_id(cfg), "adaptive_multi", n, nh, static_cast<int>(patterns.size()), -1,
            -1, multi.mean, multi.max, multi.non_converged == 0);
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);

    DatasetHandle data = open_dataset(cfg);
    ResultWriter out(fs::path(cfg.out_dir) / "results.csv");

    switch (cfg.experiment) {
        case ExperimentKind::Store: run_store(cfg, data, out); break;
        case ExperimentKind::Retrieve: run_retrieve(cfg, data, out); break;
        case ExperimentKind::Capacity: run_capacity(cfg, data, out); break;
        case ExperimentKind::FaultSweep: run_faults(cfg, data, out); break;
        case ExperimentKind::ScalingSweep: run_scaling(cfg, data, out); break;
        case ExperimentKind::ContinuousDemo: {
            // A retrieve run with continuous patterns and Gaussian corruption.
            ExperimentConfig sub = cfg;
            sub.dataset.kind = PatternKind::Continuous;
            sub.corruption.kind = CorruptionKind::Gaussian;
            run_retrieve(sub, data, out);
            break;
        }
        case ExperimentKind::CostCompare: run_cost(cfg, data, out); break;
    }

    std::ofstream manifest(fs::path(cfg.out_dir) / "manifest.txt");
    manifest << "# " << kToolVersion << " run manifest; re-runnable as a config file\n"
             << cfg.to_text();
}

}  // namespace amsim
