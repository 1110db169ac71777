#include <doctest.h>

#include "amsim/costmodel.hpp"

using namespace amsim;

namespace {

CostParams unit_params() {
    CostParams p;
    p.e_mvm_per_cell_j = 1.0;
    p.e_adc_per_sample_j = 1.0;
    p.e_dac_per_sample_j = 1.0;
    p.t_mvm_s = 1.0;
    p.t_adc_s = 1.0;
    p.t_dac_s = 1.0;
    p.parallel_adc_count = 2;
    return p;
}

RetrievalTrace trace_of(int iters, bool converged, bool cycle) {
    RetrievalTrace t;
    t.iterations_used = iters;
    t.converged = converged;
    t.cycle_detected = cycle;
    return t;
}

}  // namespace

TEST_CASE("cost_sync_single") {
    CostParams p = unit_params();

    SUBCASE("hand-counted N = 2, one iteration") {
        CostReport r = cost_sync_single(2, 1, p);
        CHECK(r.mvm_energy_j == 4.0);   // N^2 cells
        CHECK(r.adc_energy_j == 2.0);   // one conversion per row
        CHECK(r.dac_energy_j == 2.0);   // one drive per column
        CHECK(r.total_energy_j == 8.0);
        CHECK(r.total_latency_s == 3.0);  // t_mvm + ceil(2/2) t_adc + t_dac
    }

    SUBCASE("linear in iterations") {
        CostReport one = cost_sync_single(8, 3, p);
        CostReport two = cost_sync_single(8, 6, p);
        CHECK(two.total_energy_j == 2.0 * one.total_energy_j);
        CHECK(two.total_latency_s == 2.0 * one.total_latency_s);
    }

    SUBCASE("MVM energy scales as N^2") {
        p.e_adc_per_sample_j = 0.0;
        p.e_dac_per_sample_j = 0.0;
        CHECK(cost_sync_single(16, 1, p).total_energy_j ==
              4.0 * cost_sync_single(8, 1, p).total_energy_j);
    }

    SUBCASE("ADC serialization lengthens latency") {
        p.parallel_adc_count = 1;
        CHECK(cost_sync_single(4, 1, p).total_latency_s == 1.0 + 4.0 + 1.0);
        p.parallel_adc_count = 64;
        CHECK(cost_sync_single(4, 1, p).total_latency_s == 3.0);
    }

    SUBCASE("invalid arguments") {
        CHECK_THROWS_AS(cost_sync_single(0, 1, p), std::invalid_argument);
        CHECK_THROWS_AS(cost_sync_single(4, 0, p), std::invalid_argument);
        p.e_mvm_per_cell_j = -1.0;
        CHECK_THROWS_AS(cost_sync_single(4, 1, p), std::invalid_argument);
    }
}

TEST_CASE("cost_async_single") {
    CostParams p = unit_params();

    SUBCASE("hand-counted N = 2, one sweep") {
        // Two row updates, each re-driving both inputs and converting one sample.
        CostReport r = cost_async_single(2, 1, p);
        CHECK(r.mvm_energy_j == 4.0);
        CHECK(r.dac_energy_j == 4.0);
        CHECK(r.adc_energy_j == 2.0);
        CHECK(r.total_energy_j == 10.0);
        CHECK(r.total_latency_s == 6.0);  // N sequential updates
    }

    SUBCASE("degenerate N = 1 equals the synchronous model") {
        p.parallel_adc_count = 1;
        CostReport s = cost_sync_single(1, 5, p);
        CostReport a = cost_async_single(1, 5, p);
        CHECK(s.total_energy_j == a.total_energy_j);
        CHECK(s.total_latency_s == a.total_latency_s);
    }

    SUBCASE("sync latency advantage approaches the update count") {
        // With enough parallel ADCs the sync step is O(1) while async is O(N).
        CostParams q = unit_params();
        q.parallel_adc_count = 64;
        const double ratio = cost_async_single(64, 1, q).total_latency_s /
                             cost_sync_single(64, 1, q).total_latency_s;
        CHECK(ratio == doctest::Approx(64.0));
    }

    SUBCASE("async spends more DAC energy than sync at equal iteration count") {
        CostReport s = cost_sync_single(32, 4, p);
        CostReport a = cost_async_single(32, 4, p);
        CHECK(a.dac_energy_j == 32.0 * s.dac_energy_j);
        CHECK(a.mvm_energy_j == s.mvm_energy_j);
    }
}

TEST_CASE("cost_multilayer") {
    CostParams p = unit_params();

    SUBCASE("hand-counted N = 4, N_h = 2, one iteration") {
        CostReport r = cost_multilayer(4, 2, 1, p);
        CHECK(r.mvm_energy_j == 16.0);  // 2 stages of 4*2 cells
        CHECK(r.adc_energy_j == 6.0);   // N + N_h samples
        CHECK(r.dac_energy_j == 6.0);
        CHECK(r.total_energy_j == 28.0);
        CHECK(r.total_latency_s == 2.0 + (1.0 + 2.0) + 2.0);  // ceil(2/2) + ceil(4/2) ADC slots
    }

    SUBCASE("cell count is bilinear in N and N_h") {
        p.e_adc_per_sample_j = 0.0;
        p.e_dac_per_sample_j = 0.0;
        CHECK(cost_multilayer(8, 4, 1, p).total_energy_j ==
              2.0 * cost_multilayer(8, 2, 1, p).total_energy_j);
        CHECK(cost_multilayer(16, 4, 1, p).total_energy_j ==
              2.0 * cost_multilayer(8, 4, 1, p).total_energy_j);
    }

    SUBCASE("invalid hidden size") {
        CHECK_THROWS_AS(cost_multilayer(8, 0, 1, p), std::invalid_argument);
    }
}

TEST_CASE("default calibration lands in the reported operating band") {
    // At N = 64 the synchronous array should beat per-neuron serial updates by
    // well over 95% in latency while costing only a few-fold more energy per
    // converged retrieval.
    CostParams p;  // defaults
    const int n = 64;
    CostReport sync = cost_sync_single(n, 2, p);
    CostReport async_ = cost_async_single(n, 2, p);
    const double latency_reduction = 1.0 - sync.total_latency_s / async_.total_latency_s;
    const double energy_ratio = async_.total_energy_j / sync.total_energy_j;
    CHECK(latency_reduction > 0.95);
    CHECK(energy_ratio > 2.0);
    CHECK(energy_ratio < 10.0);
}

TEST_CASE("iteration_counts_from_traces") {
    std::vector<RetrievalTrace> traces = {
        trace_of(2, true, false),
        trace_of(6, false, true),
        trace_of(10, false, false),  // hit the cap
    };
    IterationStats stats = iteration_counts_from_traces(traces);
    CHECK(stats.mean == doctest::Approx(6.0));
    CHECK(stats.max == 10);
    CHECK(stats.non_converged == 1);

    CHECK_THROWS_AS(iteration_counts_from_traces({}), std::invalid_argument);
}
