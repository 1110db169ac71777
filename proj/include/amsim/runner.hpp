#pragma once

#include <string>

#include "amsim/config.hpp"

namespace amsim {

inline constexpr const char* kToolVersion = "amsim 0.1.0";

// Executes the configured experiment and writes results.csv, manifest.txt
// and optional conductance snapshots under cfg.out_dir.
// Throws ConfigError / DataError / std::runtime_error for the CLI to map to
// exit codes.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace amsim
