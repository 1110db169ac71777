#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>

#include "amsim/learning.hpp"
#include "amsim/pattern.hpp"

namespace amsim {

// Hardware constants of the emulated 1T1M array. Conductances in microsiemens.
struct CrossbarConfig {
    double g_min_us = 0.0;
    double g_max_us = 150.0;
    double write_tolerance_us = 5.0;
    double read_voltage_v = 0.2;
    double program_error_mean_us = 0.108;
    double program_error_std_us = 3.894;
    double stuck_fraction = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Differential-pair conductance image of a weight matrix. Exactly one device
// of each pair is nonzero under the one-sided mapping.
struct CrossbarPair {
    Eigen::MatrixXd g_plus;   // R x C, microsiemens
    Eigen::MatrixXd g_minus;  // R x C, microsiemens
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> stuck;  // weight-level
    double scale = 1.0;  // microsiemens per weight unit

    Eigen::Index rows() const { return g_plus.rows(); }
    Eigen::Index cols() const { return g_plus.cols(); }
};

// One-sided differential mapping: s = g_max / max|W| (1 for W = 0);
// positive weights on g_plus, negative on g_minus. No noise applied.
CrossbarPair map_weights(const Eigen::MatrixXd& w, const CrossbarConfig& cfg);

// Write-and-verify outcome model: every nonzero-target, non-stuck device
// receives clamp(target + eps, g_min, g_max) with eps ~ N(mean, std).
// Devices are drawn row-major, g_plus before g_minus per cell.
CrossbarPair program(const CrossbarPair& pair, const CrossbarConfig& cfg);

// Stuck-at-zero faults on floor(fraction * R * C) weight locations, chosen
// uniformly without replacement.
std::pair<CrossbarPair, FaultMask> inject_faults(const CrossbarPair& pair, double fraction,
                                                 std::uint64_t seed);

// Analog matrix-vector product via Ohm/Kirchhoff, accumulated per 64-column
// tile with digitally summed partials; result rescaled back to weight units.
Eigen::VectorXd mvm(const CrossbarPair& pair, const Pattern& x, const CrossbarConfig& cfg);

// Effective weight matrix as realised by the array: (g_plus - g_minus)/scale.
Eigen::MatrixXd read_weights(const CrossbarPair& pair);

// Snapshot rows: row, col, g_plus_us, g_minus_us, stuck.
void write_conductance_csv(std::ostream& os, const CrossbarPair& pair);

}  // namespace amsim
