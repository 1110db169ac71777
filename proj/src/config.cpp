#include "amsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace amsim {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

const std::map<std::string, ExperimentKind> kExperiments = {
    {"store", ExperimentKind::Store},
    {"retrieve", ExperimentKind::Retrieve},
    {"capacity", ExperimentKind::Capacity},
    {"faults", ExperimentKind::FaultSweep},
    {"scaling", ExperimentKind::ScalingSweep},
    {"continuous_demo", ExperimentKind::ContinuousDemo},
    {"cost", ExperimentKind::CostCompare},
};

const std::map<std::string, LearningRule> kRules = {
    {"hebbian", LearningRule::Hebbian},
    {"storkey", LearningRule::Storkey},
    {"pseudo_inverse", LearningRule::PseudoInverse},
    {"adaptive_single", LearningRule::AdaptiveSingle},
    {"adaptive_multi", LearningRule::AdaptiveMulti},
};

// Collects parse errors; every setter reports rather than throws so a
// single pass surfaces all problems at once.
struct ErrorSink {
    std::vector<std::string> errors;
    void add(const std::string& msg) { errors.push_back(msg); }
};

bool parse_bool(const std::string& v, const std::string& key, ErrorSink& sink, bool& out) {
    if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
    if (v == "false" || v == "0" || v == "no") { out = false; return true; }
    sink.add("key '" + key + "': expected boolean, got '" + v + "'");
    return false;
}

bool parse_double(const std::string& v, const std::string& key, ErrorSink& sink, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(v, &pos);
        if (pos == v.size()) return true;
    } catch (...) {
    }
    sink.add("key '" + key + "': expected number, got '" + v + "'");
    return false;
}

bool parse_int(const std::string& v, const std::string& key, ErrorSink& sink, int& out) {
    try {
        std::size_t pos = 0;
        out = std::stoi(v, &pos);
        if (pos == v.size()) return true;
    } catch (...) {
    }
    sink.add("key '" + key + "': expected integer, got '" + v + "'");
    return false;
}

bool parse_u64(const std::string& v, const std::string& key, ErrorSink& sink,
               std::uint64_t& out) {
    try {
        std::size_t pos = 0;
        out = std::stoull(v, &pos);
        if (pos == v.size()) return true;
    } catch (...) {
    }
    sink.add("key '" + key + "': expected unsigned integer, got '" + v + "'");
    return false;
}

template <typename T>
std::vector<T> parse_list(const std::string& v, const std::string& key, ErrorSink& sink,
                          bool (*item)(const std::string&, const std::string&, ErrorSink&, T&)) {
    std::vector<T> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        T val{};
        if (item(trim(tok), key, sink, val)) out.push_back(val);
    }
    if (out.empty()) sink.add("key '" + key + "': empty list");
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&errs] {
          std::string msg = "configuration errors:";
          for (const auto& e : errs) msg += "\n  - " + e;
          return msg;
      }()),
      errors(std::move(errs)) {}

int ExperimentConfig::resolved_hidden_dim() const {
    return hidden_dim > 0 ? hidden_dim : std::max(1, pattern_dim() / 2);
}

TrainingConfig ExperimentConfig::resolved_training() const {
    if (training_overridden) return training;
    TrainingConfig cfg = rule == LearningRule::AdaptiveMulti ? TrainingConfig::multilayer()
                                                             : TrainingConfig::single_layer();
    cfg.seed = training.seed;
    return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
    ErrorSink sink;
    std::map<std::string, std::string> kv;

    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            sink.add("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            sink.add("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        if (kv.count(key)) {
            sink.add("duplicate key '" + key + "'");
            continue;
        }
        kv[key] = value;
    }

    ExperimentConfig cfg;
    cfg.capacity.pattern_step = 0;  // 0 = derive from N after parsing
    bool have_experiment = false, have_source = false;

    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("experiment")) {
        auto it = kExperiments.find(*v);
        if (it == kExperiments.end())
            sink.add("key 'experiment': unknown experiment kind '" + *v + "'");
        else {
            cfg.experiment = it->second;
            have_experiment = true;
        }
    }
    if (auto v = take("rule")) {
        auto it = kRules.find(*v);
        if (it == kRules.end())
            sink.add("key 'rule': unknown learning rule '" + *v + "'");
        else
            cfg.rule = it->second;
    }
    if (auto v = take("seed")) parse_u64(*v, "seed", sink, cfg.seed);
    if (auto v = take("out")) cfg.out_dir = *v;
    if (auto v = take("threads")) {
        parse_int(*v, "threads", sink, cfg.threads);
        if (cfg.threads < 1) sink.add("key 'threads': must be >= 1");
    }

    if (auto v = take("dataset.source")) {
        if (*v == "mnist") { cfg.dataset.source = DataSource::MnistIdx; have_source = true; }
        else if (*v == "random") { cfg.dataset.source = DataSource::Random; have_source = true; }
        else sink.add("key 'dataset.source': expected 'mnist' or 'random', got '" + *v + "'");
    }
    if (auto v = take("dataset.images")) cfg.dataset.images_path = *v;
    if (auto v = take("dataset.labels")) cfg.dataset.labels_path = *v;
    if (auto v = take("dataset.kind")) {
        if (*v == "binary") cfg.dataset.kind = PatternKind::Binary;
        else if (*v == "continuous") cfg.dataset.kind = PatternKind::Continuous;
        else sink.add("key 'dataset.kind': expected 'binary' or 'continuous', got '" + *v + "'");
    }
    if (auto v = take("dataset.side")) {
        parse_int(*v, "dataset.side", sink, cfg.dataset.target_side);
        if (cfg.dataset.target_side < 1) sink.add("key 'dataset.side': must be >= 1");
    }
    if (auto v = take("dataset.count")) {
        parse_int(*v, "dataset.count", sink, cfg.dataset.count);
        if (cfg.dataset.count < 1) sink.add("key 'dataset.count': must be >= 1");
    }
    if (auto v = take("dataset.per_digit")) parse_bool(*v, "dataset.per_digit", sink, cfg.dataset.per_digit);

    if (auto v = take("net.hidden")) {
        parse_int(*v, "net.hidden", sink, cfg.hidden_dim);
        if (cfg.hidden_dim < 0) sink.add("key 'net.hidden': must be >= 0 (0 = N/2)");
    }

    if (auto v = take("crossbar.emulated")) parse_bool(*v, "crossbar.emulated", sink, cfg.crossbar_emulated);
    if (auto v = take("crossbar.program_noise"))
        parse_bool(*v, "crossbar.program_noise", sink, cfg.crossbar_program_noise);
    if (auto v = take("crossbar.export_conductance"))
        parse_bool(*v, "crossbar.export_conductance", sink, cfg.export_conductance);
    if (auto v = take("crossbar.g_max")) parse_double(*v, "crossbar.g_max", sink, cfg.crossbar.g_max_us);
    if (auto v = take("crossbar.g_min")) parse_double(*v, "crossbar.g_min", sink, cfg.crossbar.g_min_us);
    if (auto v = take("crossbar.write_tolerance"))
        parse_double(*v, "crossbar.write_tolerance", sink, cfg.crossbar.write_tolerance_us);
    if (auto v = take("crossbar.read_voltage"))
        parse_double(*v, "crossbar.read_voltage", sink, cfg.crossbar.read_voltage_v);
    if (auto v = take("crossbar.error_mean"))
        parse_double(*v, "crossbar.error_mean", sink, cfg.crossbar.program_error_mean_us);
    if (auto v = take("crossbar.error_std"))
        parse_double(*v, "crossbar.error_std", sink, cfg.crossbar.program_error_std_us);
    if (auto v = take("crossbar.stuck_fraction")) {
        parse_double(*v, "crossbar.stuck_fraction", sink, cfg.crossbar.stuck_fraction);
        if (cfg.crossbar.stuck_fraction < 0.0 || cfg.crossbar.stuck_fraction > 1.0)
            sink.add("key 'crossbar.stuck_fraction': must lie in [0,1]");
    }

    if (auto v = take("train.rate")) {
        parse_double(*v, "train.rate", sink, cfg.training.learning_rate);
        cfg.training_overridden = true;
    }
    if (auto v = take("train.max_steps")) {
        parse_int(*v, "train.max_steps", sink, cfg.training.max_steps);
        if (cfg.training.max_steps < 1) sink.add("key 'train.max_steps': must be >= 1");
        cfg.training_overridden = true;
    }
    if (auto v = take("train.threshold")) {
        parse_double(*v, "train.threshold", sink, cfg.training.loss_threshold);
        cfg.training_overridden = true;
    }
    if (auto v = take("train.optimizer")) {
        if (*v == "plain") cfg.training.optimizer = Optimizer::PlainGD;
        else if (*v == "rmsprop") cfg.training.optimizer = Optimizer::RMSProp;
        else sink.add("key 'train.optimizer': expected 'plain' or 'rmsprop', got '" + *v + "'");
        cfg.training_overridden = true;
    }

    if (auto v = take("retrieve.max_iterations")) {
        parse_int(*v, "retrieve.max_iterations", sink, cfg.retrieval.max_iterations);
        if (cfg.retrieval.max_iterations < 1)
            sink.add("key 'retrieve.max_iterations': must be >= 1");
    }
    if (auto v = take("retrieve.tolerance"))
        parse_double(*v, "retrieve.tolerance", sink, cfg.retrieval.continuous_tolerance);
    if (auto v = take("retrieve.mode")) {
        if (*v == "sync") cfg.retrieval.mode = UpdateMode::Synchronous;
        else if (*v == "async") cfg.retrieval.mode = UpdateMode::Asynchronous;
        else sink.add("key 'retrieve.mode': expected 'sync' or 'async', got '" + *v + "'");
    }

    if (auto v = take("corrupt.kind")) {
        if (*v == "flip") cfg.corruption.kind = CorruptionKind::Flip;
        else if (*v == "gaussian") cfg.corruption.kind = CorruptionKind::Gaussian;
        else sink.add("key 'corrupt.kind': expected 'flip' or 'gaussian', got '" + *v + "'");
    }
    if (auto v = take("corrupt.flip_prob")) {
        parse_double(*v, "corrupt.flip_prob", sink, cfg.corruption.flip_prob);
        if (cfg.corruption.flip_prob < 0.0 || cfg.corruption.flip_prob > 1.0)
            sink.add("key 'corrupt.flip_prob': must lie in [0,1]");
    }
    if (auto v = take("corrupt.sigma")) {
        parse_double(*v, "corrupt.sigma", sink, cfg.corruption.sigma);
        if (cfg.corruption.sigma < 0.0) sink.add("key 'corrupt.sigma': must be >= 0");
    }

    if (auto v = take("capacity.threshold")) {
        parse_double(*v, "capacity.threshold", sink, cfg.capacity.similarity_threshold);
        if (cfg.capacity.similarity_threshold <= 0.0 || cfg.capacity.similarity_threshold > 1.0)
            sink.add("key 'capacity.threshold': must lie in (0,1]");
    }
    if (auto v = take("capacity.repeats")) {
        parse_int(*v, "capacity.repeats", sink, cfg.capacity.repeats);
        if (cfg.capacity.repeats < 1) sink.add("key 'capacity.repeats': must be >= 1");
    }
    if (auto v = take("capacity.step")) {
        parse_int(*v, "capacity.step", sink, cfg.capacity.pattern_step);
        if (cfg.capacity.pattern_step < 0) sink.add("key 'capacity.step': must be >= 0");
    }
    if (auto v = take("capacity.max_patterns")) {
        parse_int(*v, "capacity.max_patterns", sink, cfg.capacity.max_patterns);
        if (cfg.capacity.max_patterns < 0) sink.add("key 'capacity.max_patterns': must be >= 0");
    }
    if (auto v = take("capacity.full_sweep")) {
        bool full = false;
        parse_bool(*v, "capacity.full_sweep", sink, full);
        cfg.capacity.stop_after_first_fail = !full;
    }

    if (auto v = take("scaling.sides"))
        cfg.scaling_sides = parse_list<int>(*v, "scaling.sides", sink, parse_int);
    if (auto v = take("faults.fractions"))
        cfg.fault_fractions = parse_list<double>(*v, "faults.fractions", sink, parse_double);

    if (auto v = take("cost.e_mvm")) parse_double(*v, "cost.e_mvm", sink, cfg.cost.e_mvm_per_cell_j);
    if (auto v = take("cost.e_adc")) parse_double(*v, "cost.e_adc", sink, cfg.cost.e_adc_per_sample_j);
    if (auto v = take("cost.e_dac")) parse_double(*v, "cost.e_dac", sink, cfg.cost.e_dac_per_sample_j);
    if (auto v = take("cost.t_mvm")) parse_double(*v, "cost.t_mvm", sink, cfg.cost.t_mvm_s);
    if (auto v = take("cost.t_adc")) parse_double(*v, "cost.t_adc", sink, cfg.cost.t_adc_s);
    if (auto v = take("cost.t_dac")) parse_double(*v, "cost.t_dac", sink, cfg.cost.t_dac_s);
    if (auto v = take("cost.adc_count")) {
        parse_int(*v, "cost.adc_count", sink, cfg.cost.parallel_adc_count);
        if (cfg.cost.parallel_adc_count < 1) sink.add("key 'cost.adc_count': must be >= 1");
    }

    for (const auto& [key, value] : kv) sink.add("unknown key '" + key + "'");

    if (!have_experiment) sink.add("missing required key 'experiment'");
    if (!have_source) sink.add("missing required key 'dataset.source'");
    if (have_source && cfg.dataset.source == DataSource::MnistIdx &&
        cfg.dataset.images_path.empty())
        sink.add("missing required key 'dataset.images' (dataset.source = mnist)");
    if (cfg.rule == LearningRule::AdaptiveMulti && cfg.experiment == ExperimentKind::Store &&
        cfg.hidden_dim < 0)
        sink.add("key 'net.hidden': required for adaptive_multi");

    if (!sink.errors.empty()) throw ConfigError(std::move(sink.errors));

    // Dependent defaults.
    if (cfg.capacity.pattern_step == 0)
        cfg.capacity.pattern_step = std::max(1, cfg.pattern_dim() / 32);
    if (cfg.capacity.max_patterns == 0) cfg.capacity.max_patterns = 2 * cfg.pattern_dim();
    cfg.capacity.corruption = cfg.corruption;
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError({"cannot open config file: " + path});
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string to_string(ExperimentKind k) {
    for (const auto& [name, kind] : kExperiments)
        if (kind == k) return name;
    return "?";
}

std::string to_string(LearningRule r) {
    for (const auto& [name, rule] : kRules)
        if (rule == r) return name;
    return "?";
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "experiment = " << amsim::to_string(experiment) << '\n';
    os << "rule = " << amsim::to_string(rule) << '\n';
    os << "seed = " << seed << '\n';
    os << "out = " << out_dir << '\n';
    os << "threads = " << threads << '\n';
    os << "dataset.source = " << (dataset.source == DataSource::MnistIdx ? "mnist" : "random")
       << '\n';
    if (!dataset.images_path.empty()) os << "dataset.images = " << dataset.images_path << '\n';
    if (!dataset.labels_path.empty()) os << "dataset.labels = " << dataset.labels_path << '\n';
    os << "dataset.kind = " << (dataset.kind == PatternKind::Binary ? "binary" : "continuous")
       << '\n';
    os << "dataset.side = " << dataset.target_side << '\n';
    os << "dataset.count = " << dataset.count << '\n';
    os << "dataset.per_digit = " << (dataset.per_digit ? "true" : "false") << '\n';
    os << "net.hidden = " << hidden_dim << '\n';
    os << "crossbar.emulated = " << (crossbar_emulated ? "true" : "false") << '\n';
    os << "crossbar.program_noise = " << (crossbar_program_noise ? "true" : "false") << '\n';
    os << "crossbar.export_conductance = " << (export_conductance ? "true" : "false") << '\n';
    os << "crossbar.g_min = " << crossbar.g_min_us << '\n';
    os << "crossbar.g_max = " << crossbar.g_max_us << '\n';
    os << "crossbar.write_tolerance = " << crossbar.write_tolerance_us << '\n';
    os << "crossbar.read_voltage = " << crossbar.read_voltage_v << '\n';
    os << "crossbar.error_mean = " << crossbar.program_error_mean_us << '\n';
    os << "crossbar.error_std = " << crossbar.program_error_std_us << '\n';
    os << "crossbar.stuck_fraction = " << crossbar.stuck_fraction << '\n';
    const TrainingConfig t = resolved_training();
    os << "train.rate = " << t.learning_rate << '\n';
    os << "train.max_steps = " << t.max_steps << '\n';
    os << "train.threshold = " << t.loss_threshold << '\n';
    os << "train.optimizer = " << (t.optimizer == Optimizer::PlainGD ? "plain" : "rmsprop")
       << '\n';
    os << "retrieve.max_iterations = " << retrieval.max_iterations << '\n';
    os << "retrieve.tolerance = " << retrieval.continuous_tolerance << '\n';
    os << "retrieve.mode = " << (retrieval.mode == UpdateMode::Synchronous ? "sync" : "async")
       << '\n';
    os << "corrupt.kind = " << (corruption.kind == CorruptionKind::Flip ? "flip" : "gaussian")
       << '\n';
    os << "corrupt.flip_prob = " << corruption.flip_prob << '\n';
    os << "corrupt.sigma = " << corruption.sigma << '\n';
    os << "capacity.threshold = " << capacity.similarity_threshold << '\n';
    os << "capacity.repeats = " << capacity.repeats << '\n';
    os << "capacity.step = " << capacity.pattern_step << '\n';
    os << "capacity.max_patterns = " << capacity.max_patterns << '\n';
    os << "capacity.full_sweep = " << (capacity.stop_after_first_fail ? "false" : "true") << '\n';
    os << "scaling.sides = ";
    for (std::size_t i = 0; i < scaling_sides.size(); ++i)
        os << (i ? "," : "") << scaling_sides[i];
    os << '\n';
    os << "faults.fractions = ";
    for (std::size_t i = 0; i < fault_fractions.size(); ++i)
        os << (i ? "," : "") << fault_fractions[i];
    os << '\n';
    os << "cost.e_mvm = " << cost.e_mvm_per_cell_j << '\n';
    os << "cost.e_adc = " << cost.e_adc_per_sample_j << '\n';
    os << "cost.e_dac = " << cost.e_dac_per_sample_j << '\n';
    os << "cost.t_mvm = " << cost.t_mvm_s << '\n';
    os << "cost.t_adc = " << cost.t_adc_s << '\n';
    os << "cost.t_dac = " << cost.t_dac_s << '\n';
    os << "cost.adc_count = " << cost.parallel_adc_count << '\n';
    return os.str();
}

}  // namespace amsim
