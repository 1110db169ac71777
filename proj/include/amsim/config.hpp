#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "amsim/costmodel.hpp"
#include "amsim/crossbar.hpp"
#include "amsim/data.hpp"
#include "amsim/learning.hpp"
#include "amsim/metrics.hpp"

namespace amsim {

enum class ExperimentKind {
    Store,
    Retrieve,
    Capacity,
    FaultSweep,
    ScalingSweep,
    ContinuousDemo,
    CostCompare,
};

enum class LearningRule { Hebbian, Storkey, PseudoInverse, AdaptiveSingle, AdaptiveMulti };

struct ConfigError : std::runtime_error {
    std::vector<std::string> errors;
    explicit ConfigError(std::vector<std::string> errs);
};

// Fully resolved experiment description; together with the input files it
// determines every byte of the outputs.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Retrieve;
    LearningRule rule = LearningRule::AdaptiveSingle;
    std::uint64_t seed = 0;
    std::string out_dir = "results";
    int threads = 1;

    DatasetSpec dataset;
    int hidden_dim = 0;  // 0 -> N/2

    bool crossbar_emulated = false;
    bool crossbar_program_noise = true;
    bool export_conductance = false;
    CrossbarConfig crossbar;

    TrainingConfig training;
    bool training_overridden = false;  // explicit train.* keys beat rule defaults

    RetrievalConfig retrieval;
    CorruptionSpec corruption;

    CapacitySpec capacity;
    std::vector<int> scaling_sides = {8, 10, 12, 14};
    std::vector<double> fault_fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};

    CostParams cost;

    // Defaults that depend on other fields (N, rule).
    int resolved_hidden_dim() const;
    int pattern_dim() const { return dataset.target_side * dataset.target_side; }
    TrainingConfig resolved_training() const;

    // Round-trippable key=value form; doubles as the run manifest.
    std::string to_text() const;
};

// Parses the key=value config format. Collects every error (unknown keys,
// duplicates, type mismatches, constraint violations, missing required
// fields) before throwing ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::string to_string(ExperimentKind k);
std::string to_string(LearningRule r);

}  // namespace amsim
