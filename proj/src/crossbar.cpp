#include "amsim/crossbar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "amsim/rng.hpp"

namespace amsim {

namespace {
constexpr Eigen::Index kTileSize = 64;  // physical array width
}

void CrossbarConfig::validate() const {
    if (g_min_us > g_max_us) throw std::invalid_argument("CrossbarConfig: g_min > g_max");
    if (write_tolerance_us <= 0.0)
        throw std::invalid_argument("CrossbarConfig: write_tolerance must be positive");
    if (program_error_std_us < 0.0)
        throw std::invalid_argument("CrossbarConfig: negative program error std");
    if (stuck_fraction < 0.0 || stuck_fraction > 1.0)
        throw std::invalid_argument("CrossbarConfig: stuck_fraction outside [0,1]");
}

CrossbarPair map_weights(const Eigen::MatrixXd& w, const CrossbarConfig& cfg) {
    cfg.validate();
    if (!w.allFinite()) throw std::invalid_argument("map_weights: non-finite weight entries");

    const double wmax = w.cwiseAbs().maxCoeff();
    CrossbarPair pair;
    pair.scale = wmax > 0.0 ? cfg.g_max_us / wmax : 1.0;
    pair.g_plus = (pair.scale * w).cwiseMax(0.0);
    pair.g_minus = (-pair.scale * w).cwiseMax(0.0);
    pair.stuck.setConstant(w.rows(), w.cols(), false);
    return pair;
}

CrossbarPair program(const CrossbarPair& pair, const CrossbarConfig& cfg) {
    cfg.validate();
    CrossbarPair out = pair;
    auto rng = make_rng(cfg.seed);
    std::normal_distribution<double> err(cfg.program_error_mean_us, cfg.program_error_std_us);

    auto write = [&](double target) {
        if (cfg.program_error_std_us == 0.0 && cfg.program_error_mean_us == 0.0) return target;
        return std::clamp(target + err(rng), cfg.g_min_us, cfg.g_max_us);
    };

    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            if (out.stuck(i, j)) {
                out.g_plus(i, j) = 0.0;
                out.g_minus(i, j) = 0.0;
                continue;
            }
            // Zero-target devices are left unprogrammed.
            if (out.g_plus(i, j) != 0.0) out.g_plus(i, j) = write(out.g_plus(i, j));
            if (out.g_minus(i, j) != 0.0) out.g_minus(i, j) = write(out.g_minus(i, j));
        }
    }
    return out;
}

std::pair<CrossbarPair, FaultMask> inject_faults(const CrossbarPair& pair, double fraction,
                                                 std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("inject_faults: fraction outside [0,1]");
    const Eigen::Index r = pair.rows(), c = pair.cols();
    const auto total = static_cast<std::size_t>(r * c);
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total)));

    std::vector<std::size_t> cells(total);
    std::iota(cells.begin(), cells.end(), 0);
    auto rng = make_rng(seed);
    std::shuffle(cells.begin(), cells.end(), rng);

    CrossbarPair out = pair;
    FaultMask mask;
    mask.stuck.setConstant(r, c, false);
    for (std::size_t t = 0; t < k; ++t) {
        const Eigen::Index i = static_cast<Eigen::Index>(cells[t]) / c;
        const Eigen::Index j = static_cast<Eigen::Index>(cells[t]) % c;
        mask.stuck(i, j) = true;
        out.stuck(i, j) = true;
        out.g_plus(i, j) = 0.0;
        out.g_minus(i, j) = 0.0;
    }
    return {std::move(out), std::move(mask)};
}

Eigen::VectorXd mvm(const CrossbarPair& pair, const Pattern& x, const CrossbarConfig& cfg) {
    if (x.size() != pair.cols()) throw std::invalid_argument("mvm: input length mismatch");
    Eigen::VectorXd drive = cfg.read_voltage_v * x.values;  // column voltages

    // Partial currents per 64-column tile, summed digitally.
    Eigen::VectorXd current = Eigen::VectorXd::Zero(pair.rows());
    for (Eigen::Index c0 = 0; c0 < pair.cols(); c0 += kTileSize) {
        const Eigen::Index w = std::min(kTileSize, pair.cols() - c0);
        current += (pair.g_plus.middleCols(c0, w) - pair.g_minus.middleCols(c0, w)) *
                   drive.segment(c0, w);
    }
    return current / (pair.scale * cfg.read_voltage_v);
}

Eigen::MatrixXd read_weights(const CrossbarPair& pair) {
    return (pair.g_plus - pair.g_minus) / pair.scale;
}

void write_conductance_csv(std::ostream& os, const CrossbarPair& pair) {
    os << "row,col,g_plus_us,g_minus_us,stuck\n";
    for (Eigen::Index i = 0; i < pair.rows(); ++i)
        for (Eigen::Index j = 0; j < pair.cols(); ++j)
            os << i << ',' << j << ',' << pair.g_plus(i, j) << ',' << pair.g_minus(i, j) << ','
               << (pair.stuck(i, j) ? 1 : 0) << '\n';
}

}  // namespace amsim
