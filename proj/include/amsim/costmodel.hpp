#pragma once

#include <vector>

#include "amsim/network.hpp"

namespace amsim {

// Per-operation constants of the analytical cost model. Defaults are
// calibration targets chosen so that sync-vs-async ratios at N = 64 land in
// the measured hardware's reported band; they are not device measurements.
struct CostParams {
    double e_mvm_per_cell_j = 1e-12;
    double e_adc_per_sample_j = 4e-12;
    double e_dac_per_sample_j = 2e-12;
    double t_mvm_s = 100e-9;
    double t_adc_s = 10e-9;
    double t_dac_s = 10e-9;
    int parallel_adc_count = 64;

    void validate() const;
};

struct CostReport {
    double total_energy_j = 0.0;
    double total_latency_s = 0.0;
    double mvm_energy_j = 0.0;
    double adc_energy_j = 0.0;
    double dac_energy_j = 0.0;
    int iterations = 0;
};

// Synchronous single-layer: one N^2-cell MVM, N DACs, N ADCs per iteration.
CostReport cost_sync_single(int n, int iterations, const CostParams& params);

// Asynchronous: N single-row updates per sweep, each driving the full input.
CostReport cost_async_single(int n, int sweeps, const CostParams& params);

// Two pipelined MVM stages of N*N_h cells each per iteration.
CostReport cost_multilayer(int n, int n_hidden, int iterations, const CostParams& params);

struct IterationStats {
    double mean = 0.0;
    int max = 0;
    int non_converged = 0;
};

// Convergence statistics from measured traces; non-converged traces count at
// their max_iterations cap and are flagged.
IterationStats iteration_counts_from_traces(const std::vector<RetrievalTrace>& traces);

}  // namespace amsim
