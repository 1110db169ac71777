#include "amsim/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "amsim/data.hpp"
#include "amsim/rng.hpp"

namespace amsim {

double cosine_similarity(const Pattern& a, const Pattern& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
    const double na2 = a.values.squaredNorm();
    const double nb2 = b.values.squaredNorm();
    if (na2 == 0.0 || nb2 == 0.0)
        throw std::invalid_argument("cosine_similarity: zero vector");
    // sqrt(na2 * nb2) rather than norm() * norm(): identical vectors then
    // score exactly 1.
    return std::clamp(a.values.dot(b.values) / std::sqrt(na2 * nb2), -1.0, 1.0);
}

SimilaritySummary retrieval_similarity(const AnyNet& net, const PatternSet& patterns,
                                       const CorruptionSpec& corruption, int repeats,
                                       const RetrievalConfig& retrieval, std::uint64_t seed) {
    SimilaritySummary out;
    if (patterns.empty() || repeats < 1) return out;

    const auto m = patterns.size();
    out.per_pattern.assign(m, 0.0);
    out.min_repeat_mean = std::numeric_limits<double>::infinity();
    out.max_repeat_mean = -std::numeric_limits<double>::infinity();

    for (int r = 0; r < repeats; ++r) {
        double repeat_mean = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
            const std::uint64_t cell_seed =
                derive_seed(seed, "corrupt", static_cast<std::uint64_t>(r) * m + p);
            Pattern corrupted =
                corruption.kind == CorruptionKind::Flip
                    ? corrupt_flip(patterns[p], corruption.flip_prob, cell_seed)
                    : corrupt_gaussian(patterns[p], corruption.sigma, cell_seed);
            RetrievalTrace trace = retrieve(net, corrupted, retrieval);
            const double sim = cosine_similarity(trace.final_state(), patterns[p]);
            out.raw.push_back(sim);
            out.iterations.push_back(trace.iterations_used);
            out.converged.push_back(trace.converged || trace.cycle_detected);
            out.per_pattern[p] += sim;
            repeat_mean += sim;
        }
        repeat_mean /= static_cast<double>(m);
        out.mean += repeat_mean;
        out.min_repeat_mean = std::min(out.min_repeat_mean, repeat_mean);
        out.max_repeat_mean = std::max(out.max_repeat_mean, repeat_mean);
    }
    out.mean /= repeats;
    for (double& v : out.per_pattern) v /= repeats;
    return out;
}

CapacityResult measure_capacity(const Trainer& trainer, const PatternProvider& patterns,
                                const RetrievalConfig& retrieval, const CapacitySpec& spec) {
    if (spec.pattern_step < 1) throw std::invalid_argument("measure_capacity: pattern_step >= 1");

    CapacityResult result;
    bool prefix_intact = true;
    for (int count = spec.pattern_step; count <= spec.max_patterns; count += spec.pattern_step) {
        CapacityPoint point;
        point.pattern_count = count;

        const std::uint64_t data_seed = derive_seed(spec.seed, "capacity-data", count);
        const std::uint64_t train_seed = derive_seed(spec.seed, "capacity-train", count);
        const std::uint64_t eval_seed = derive_seed(spec.seed, "capacity-eval", count);

        PatternSet set = patterns(count, data_seed);
        bool passed = false;
        try {
            AnyNet net = trainer(set, train_seed);
            SimilaritySummary sim = retrieval_similarity(net, set, spec.corruption, spec.repeats,
                                                         retrieval, eval_seed);
            point.mean_similarity = sim.mean;
            point.min_similarity = sim.min_repeat_mean;
            point.max_similarity = sim.max_repeat_mean;
            point.detail = std::move(sim);
            passed = point.mean_similarity > spec.similarity_threshold;
        } catch (const std::exception&) {
            point.trainer_failed = true;
        }
        result.curve.push_back(std::move(point));

        if (passed && prefix_intact) {
            result.capacity = count;
        } else {
            prefix_intact = false;
            if (spec.stop_after_first_fail) break;
        }
    }
    return result;
}

ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("fit_scaling_exponent: need at least 2 points");
    const auto n = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [N, cap] : points) {
        if (N <= 0.0 || cap <= 0.0)
            throw std::invalid_argument("fit_scaling_exponent: nonpositive values");
        const double x = std::log(N), y = std::log(cap);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_scaling_exponent: degenerate x values");

    ScalingFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.exponent * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (const auto& [N, cap] : points) {
        const double e = std::log(cap) - (fit.intercept + fit.exponent * std::log(N));
        ss_res += e * e;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace amsim
