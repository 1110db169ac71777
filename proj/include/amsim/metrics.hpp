#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "amsim/network.hpp"
#include "amsim/pattern.hpp"

namespace amsim {

enum class CorruptionKind { Flip, Gaussian };

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::Flip;
    double flip_prob = 0.05;
    double sigma = 0.6;
};

struct CapacitySpec {
    double similarity_threshold = 0.99;
    CorruptionSpec corruption;
    int repeats = 10;
    int pattern_step = 1;
    int max_patterns = 0;
    std::uint64_t seed = 0;
    // The sweep may stop after the first failing count; capacity only
    // depends on the consecutive-pass prefix.
    bool stop_after_first_fail = true;
};

struct SimilaritySummary {
    double mean = 0.0;
    double min_repeat_mean = 0.0;
    double max_repeat_mean = 0.0;
    std::vector<double> per_pattern;    // mean over repeats, per pattern
    std::vector<double> raw;            // repeat-major, pattern-minor
    std::vector<int> iterations;        // same layout as raw
    std::vector<bool> converged;        // same layout as raw
};

struct CapacityPoint {
    int pattern_count = 0;
    double mean_similarity = 0.0;
    double min_similarity = 0.0;  // min/max envelope of per-repeat means
    double max_similarity = 0.0;
    bool trainer_failed = false;
    SimilaritySummary detail;
};

struct CapacityResult {
    int capacity = 0;
    std::vector<CapacityPoint> curve;
};

double cosine_similarity(const Pattern& a, const Pattern& b);

// Corrupt / retrieve / compare each stored pattern, `repeats` times with
// independent corruption seeds.
SimilaritySummary retrieval_similarity(const AnyNet& net, const PatternSet& patterns,
                                       const CorruptionSpec& corruption, int repeats,
                                       const RetrievalConfig& retrieval, std::uint64_t seed);

// Trains a fresh net per pattern count; a trainer failure (e.g. singular
// pseudo-inverse) marks the count failed rather than aborting the sweep.
using Trainer = std::function<AnyNet(const PatternSet&, std::uint64_t seed)>;
using PatternProvider = std::function<PatternSet(int count, std::uint64_t seed)>;

CapacityResult measure_capacity(const Trainer& trainer, const PatternProvider& patterns,
                                const RetrievalConfig& retrieval, const CapacitySpec& spec);

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log-space
    double r_squared = 0.0;
};

// OLS on (log N, log capacity).
ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace amsim
