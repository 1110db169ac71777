#include "amsim/costmodel.hpp"

#include <stdexcept>

namespace amsim {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

void check_args(int n, int iterations, const CostParams& params) {
    if (n < 1) throw std::invalid_argument("cost model: N >= 1");
    if (iterations < 1) throw std::invalid_argument("cost model: iterations >= 1");
    params.validate();
}

}  // namespace

void CostParams::validate() const {
    if (e_mvm_per_cell_j < 0 || e_adc_per_sample_j < 0 || e_dac_per_sample_j < 0 || t_mvm_s < 0 ||
        t_adc_s < 0 || t_dac_s < 0 || parallel_adc_count < 1)
        throw std::invalid_argument("CostParams: all costs nonnegative, ADC count >= 1");
}

CostReport cost_sync_single(int n, int iterations, const CostParams& p) {
    check_args(n, iterations, p);
    CostReport r;
    r.iterations = iterations;
    r.mvm_energy_j = double(iterations) * n * n * p.e_mvm_per_cell_j;
    r.adc_energy_j = double(iterations) * n * p.e_adc_per_sample_j;
    r.dac_energy_j = double(iterations) * n * p.e_dac_per_sample_j;
    r.total_energy_j = r.mvm_energy_j + r.adc_energy_j + r.dac_energy_j;
    r.total_latency_s =
        iterations * (p.t_mvm_s + ceil_div(n, p.parallel_adc_count) * p.t_adc_s + p.t_dac_s);
    return r;
}

CostReport cost_async_single(int n, int sweeps, const CostParams& p) {
    check_args(n, sweeps, p);
    CostReport r;
    r.iterations = sweeps;
    // Each of the N per-neuron updates drives the full input vector and
    // converts a single output sample.
    r.mvm_energy_j = double(sweeps) * n * n * p.e_mvm_per_cell_j;
    r.dac_energy_j = double(sweeps) * n * n * p.e_dac_per_sample_j;
    r.adc_energy_j = double(sweeps) * n * p.e_adc_per_sample_j;
    r.total_energy_j = r.mvm_energy_j + r.adc_energy_j + r.dac_energy_j;
    r.total_latency_s = double(sweeps) * n * (p.t_mvm_s + p.t_adc_s + p.t_dac_s);
    return r;
}

CostReport cost_multilayer(int n, int n_hidden, int iterations, const CostParams& p) {
    check_args(n, iterations, p);
    if (n_hidden < 1) throw std::invalid_argument("cost model: N_h >= 1");
    CostReport r;
    r.iterations = iterations;
    r.mvm_energy_j = double(iterations) * 2.0 * n * n_hidden * p.e_mvm_per_cell_j;
    r.adc_energy_j = double(iterations) * (n + n_hidden) * p.e_adc_per_sample_j;
    r.dac_energy_j = double(iterations) * (n + n_hidden) * p.e_dac_per_sample_j;
    r.total_energy_j = r.mvm_energy_j + r.adc_energy_j + r.dac_energy_j;
    r.total_latency_s =
        iterations * (2.0 * p.t_mvm_s +
                      (ceil_div(n_hidden, p.parallel_adc_count) +
                       ceil_div(n, p.parallel_adc_count)) * p.t_adc_s +
                      2.0 * p.t_dac_s);
    return r;
}

IterationStats iteration_counts_from_traces(const std::vector<RetrievalTrace>& traces) {
    if (traces.empty())
        throw std::invalid_argument("iteration_counts_from_traces: empty input");
    IterationStats stats;
    for (const auto& t : traces) {
        stats.mean += t.iterations_used;
        stats.max = std::max(stats.max, t.iterations_used);
        if (!t.converged && !t.cycle_detected) ++stats.non_converged;
    }
    stats.mean /= static_cast<double>(traces.size());
    return stats;
}

}  // namespace amsim
