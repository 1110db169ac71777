#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "amsim/network.hpp"
#include "amsim/pattern.hpp"

namespace amsim {

enum class Optimizer { PlainGD, RMSProp };

struct TrainingConfig {
    double learning_rate = 3e-2;
    int max_steps = 10000;
    double loss_threshold = 1e-8;
    Optimizer optimizer = Optimizer::PlainGD;
    double rmsprop_decay = 0.99;
    double rmsprop_epsilon = 1e-8;
    double init_scale = 0.0;  // 0 -> 1/sqrt(N) fan-in default
    std::uint64_t seed = 0;

    // Calibrated defaults for the two layer counts.
    static TrainingConfig single_layer();
    static TrainingConfig multilayer();
};

// Stuck weight locations, one entry per weight; masked weights are pinned
// to exactly zero throughout training.
struct FaultMask {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> stuck;

    bool empty() const { return stuck.size() == 0; }
    Eigen::Index count() const { return stuck.cast<Eigen::Index>().sum(); }
    void apply(Eigen::MatrixXd& w) const;
};

struct MultilayerFaultMask {
    FaultMask encoder;
    FaultMask decoder;
};

struct TrainingReport {
    double final_loss = 0.0;
    int steps_used = 0;
    std::vector<double> loss_history;  // subsampled
    bool converged = false;
};

// Classical baselines (binary patterns only).
HopfieldNet train_hebbian(const PatternSet& patterns);
HopfieldNet train_storkey(const PatternSet& patterns);

// W = (1/N) Xi^T Q^-1 Xi; throws SingularPatternsError naming the dependent
// pattern indices when Q is rank deficient.
HopfieldNet train_pseudo_inverse(const PatternSet& patterns);

struct SingularPatternsError : std::runtime_error {
    std::vector<int> offending_indices;
    explicit SingularPatternsError(std::vector<int> idx);
};

// Mean over patterns of the summed squared error against tanh(W xi + b).
double adaptive_loss_single(const HopfieldNet& net, const PatternSet& patterns);
double adaptive_loss_multilayer(const MultilayerNet& net, const PatternSet& patterns);

struct SingleLayerGrad {
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_bias;
};
struct MultilayerGrad {
    Eigen::MatrixXd d_encoder;
    Eigen::VectorXd d_encoder_bias;
    Eigen::MatrixXd d_decoder;
    Eigen::VectorXd d_decoder_bias;
};

SingleLayerGrad grad_loss_single(const HopfieldNet& net, const PatternSet& patterns,
                                 const FaultMask* mask = nullptr);
MultilayerGrad grad_loss_multilayer(const MultilayerNet& net, const PatternSet& patterns,
                                    const MultilayerFaultMask* masks = nullptr);

std::pair<HopfieldNet, TrainingReport> train_adaptive_single(
    const PatternSet& patterns, const TrainingConfig& cfg,
    const std::optional<FaultMask>& mask = std::nullopt);

std::pair<MultilayerNet, TrainingReport> train_adaptive_multilayer(
    const PatternSet& patterns, int hidden_dim, const TrainingConfig& cfg,
    const std::optional<MultilayerFaultMask>& masks = std::nullopt);

}  // namespace amsim
