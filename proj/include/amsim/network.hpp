#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "amsim/pattern.hpp"

namespace amsim {

// Single-layer Hopfield network. Bias enters the local field as W*x + b
// throughout (the update and the training loss use the same sign
// convention; a thresholding bias is stored negated).
struct HopfieldNet {
    Eigen::MatrixXd weights;  // N x N
    Eigen::VectorXd bias;     // N
    double steepness = 1.0;   // tanh steepness for continuous updates

    Eigen::Index size() const { return weights.rows(); }
};

// Two-layer recurrent autoencoder: x -> tanh(W1 x + b1) -> tanh(W2 h + b2).
struct MultilayerNet {
    Eigen::MatrixXd encoder;       // N_h x N
    Eigen::VectorXd encoder_bias;  // N_h
    Eigen::MatrixXd decoder;       // N x N_h
    Eigen::VectorXd decoder_bias;  // N

    Eigen::Index input_size() const { return encoder.cols(); }
    Eigen::Index hidden_size() const { return encoder.rows(); }
};

using AnyNet = std::variant<HopfieldNet, MultilayerNet>;

enum class UpdateMode { Synchronous, Asynchronous };
enum class Activation { Sign, Tanh };

struct RetrievalConfig {
    UpdateMode mode = UpdateMode::Synchronous;
    Activation activation = Activation::Sign;
    int max_iterations = 100;
    double continuous_tolerance = 1e-4;
    std::uint64_t seed = 0;  // drives the async sweep order
};

struct RetrievalTrace {
    std::vector<Pattern> states;   // states[0] is the input
    std::vector<double> energies;  // single-layer only; one entry per state
    bool converged = false;
    bool cycle_detected = false;
    int iterations_used = 0;

    const Pattern& final_state() const { return states.back(); }
};

// Ising-form energy: -1/2 sum_ij W_ij x_i x_j + sum_i b_i x_i.
double energy(const HopfieldNet& net, const Pattern& state);

// All neurons updated at once from the old state. Sign activation uses the
// zero-field convention sgn(0) := previous state.
Pattern update_sync(const HopfieldNet& net, const Pattern& state, Activation act);

// One full sweep, neurons updated in `order`, each seeing earlier updates.
Pattern update_async_sweep(const HopfieldNet& net, const Pattern& state,
                           const std::vector<int>& order, Activation act = Activation::Sign);

// tanh(W2 tanh(W1 x + b1) + b2); callers binarise with sign if needed.
Pattern forward_multilayer(const MultilayerNet& net, const Pattern& input);

// Iterative retrieval until fixed point / 2-cycle (binary) or max-norm
// change below tolerance (continuous), capped at max_iterations. A detected
// 2-cycle resolves to the lower-energy member.
RetrievalTrace retrieve(const HopfieldNet& net, const Pattern& input, const RetrievalConfig& cfg);
RetrievalTrace retrieve(const MultilayerNet& net, const Pattern& input, const RetrievalConfig& cfg);
RetrievalTrace retrieve(const AnyNet& net, const Pattern& input, const RetrievalConfig& cfg);

}  // namespace amsim
