#include "amsim/learning.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "amsim/rng.hpp"

namespace amsim {

namespace {

Eigen::MatrixXd binary_pattern_matrix(const PatternSet& patterns) {
    if (patterns.empty()) throw std::invalid_argument("training requires at least one pattern");
    for (const auto& p : patterns)
        if (p.kind != PatternKind::Binary)
            throw std::invalid_argument("this learning rule accepts binary patterns only");
    return patterns_to_matrix(patterns);
}

// Uniform [-scale, scale] init; scale defaults to 1/sqrt(fan_in).
Eigen::MatrixXd init_weights(Eigen::Index rows, Eigen::Index cols, double scale,
                             std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = dist(rng);
    return w;
}

void record_loss(TrainingReport& report, int step, double loss, int max_steps) {
    // Keep the history small: every step for short runs, subsampled otherwise.
    const int stride = std::max(1, max_steps / 1000);
    if (step % stride == 0) report.loss_history.push_back(loss);
}

}  // namespace

TrainingConfig TrainingConfig::single_layer() {
    TrainingConfig cfg;
    cfg.learning_rate = 3e-2;
    cfg.max_steps = 10000;
    cfg.optimizer = Optimizer::PlainGD;
    return cfg;
}

TrainingConfig TrainingConfig::multilayer() {
    TrainingConfig cfg;
    cfg.learning_rate = 3e-4;
    cfg.max_steps = 60000;
    cfg.optimizer = Optimizer::RMSProp;
    return cfg;
}

void FaultMask::apply(Eigen::MatrixXd& w) const {
    if (empty()) return;
    if (stuck.rows() != w.rows() || stuck.cols() != w.cols())
        throw std::invalid_argument("FaultMask dimensions do not match weights");
    w = stuck.select(0.0, w);
}

HopfieldNet train_hebbian(const PatternSet& patterns) {
    Eigen::MatrixXd x = binary_pattern_matrix(patterns);
    const Eigen::Index n = x.rows();
    HopfieldNet net;
    net.weights = (x * x.transpose()) / static_cast<double>(n);
    net.weights.diagonal().setZero();
    net.bias = Eigen::VectorXd::Zero(n);
    return net;
}

HopfieldNet train_storkey(const PatternSet& patterns) {
    Eigen::MatrixXd x = binary_pattern_matrix(patterns);
    const Eigen::Index n = x.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index m = 0; m < x.cols(); ++m) {
        const Eigen::VectorXd xi = x.col(m);
        // Local field h_ij = sum_{k != i,j} W_ik xi_k, all from the
        // pre-update weights. With c = W xi this is c_i - W_ii xi_i - W_ij xi_j.
        Eigen::VectorXd c = w * xi - w.diagonal().cwiseProduct(xi);
        Eigen::MatrixXd h =
            c.replicate(1, n) - (w.array().rowwise() * xi.transpose().array()).matrix();
        // dW_ij = (1/N)(xi_i xi_j - xi_i h_ji - h_ij xi_j)
        Eigen::MatrixXd delta = inv_n * (xi * xi.transpose() -
                                         xi.asDiagonal() * h.transpose() -
                                         h * xi.asDiagonal());
        w += delta;
        w.diagonal().setZero();
    }

    HopfieldNet net;
    net.weights = std::move(w);
    net.bias = Eigen::VectorXd::Zero(n);
    return net;
}

SingularPatternsError::SingularPatternsError(std::vector<int> idx)
    : std::runtime_error([&idx] {
          std::ostringstream os;
          os << "pseudo-inverse: overlap matrix is singular; dependent pattern indices:";
          for (int i : idx) os << ' ' << i;
          return os.str();
      }()),
      offending_indices(std::move(idx)) {}

HopfieldNet train_pseudo_inverse(const PatternSet& patterns) {
    Eigen::MatrixXd x = binary_pattern_matrix(patterns);  // N x M
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();
    if (m > n)
        throw SingularPatternsError([&] {
            std::vector<int> idx;
            for (Eigen::Index i = n; i < m; ++i) idx.push_back(static_cast<int>(i));
            return idx;
        }());

    Eigen::MatrixXd q = (x.transpose() * x) / static_cast<double>(n);  // M x M overlaps
    Eigen::FullPivLU<Eigen::MatrixXd> lu(q);
    lu.setThreshold(1e-10);
    if (lu.rank() < m) {
        // Non-pivot columns of the LU factorisation identify patterns that
        // are linear combinations of the others.
        std::vector<int> idx;
        const auto perm = lu.permutationQ().indices();
        for (Eigen::Index k = lu.rank(); k < m; ++k) idx.push_back(perm[k]);
        std::sort(idx.begin(), idx.end());
        throw SingularPatternsError(std::move(idx));
    }

    HopfieldNet net;
    net.weights = x * lu.solve(x.transpose()) / static_cast<double>(n);
    net.bias = Eigen::VectorXd::Zero(n);
    return net;
}

double adaptive_loss_single(const HopfieldNet& net, const PatternSet& patterns) {
    Eigen::MatrixXd x = patterns_to_matrix(patterns);
    if (x.rows() != net.size())
        throw std::invalid_argument("adaptive_loss_single: pattern length mismatch");
    Eigen::MatrixXd t =
        (net.steepness * ((net.weights * x).colwise() + net.bias)).array().tanh();
    return (t - x).squaredNorm() / static_cast<double>(x.cols());
}

double adaptive_loss_multilayer(const MultilayerNet& net, const PatternSet& patterns) {
    Eigen::MatrixXd x = patterns_to_matrix(patterns);
    if (x.rows() != net.input_size())
        throw std::invalid_argument("adaptive_loss_multilayer: pattern length mismatch");
    Eigen::MatrixXd h = ((net.encoder * x).colwise() + net.encoder_bias).array().tanh();
    Eigen::MatrixXd y = ((net.decoder * h).colwise() + net.decoder_bias).array().tanh();
    return (y - x).squaredNorm() / static_cast<double>(x.cols());
}

SingleLayerGrad grad_loss_single(const HopfieldNet& net, const PatternSet& patterns,
                                 const FaultMask* mask) {
    Eigen::MatrixXd x = patterns_to_matrix(patterns);
    if (x.rows() != net.size())
        throw std::invalid_argument("grad_loss_single: pattern length mismatch");
    const double inv_m = 1.0 / static_cast<double>(x.cols());
    const double lam = net.steepness;

    Eigen::MatrixXd t = (lam * ((net.weights * x).colwise() + net.bias)).array().tanh();
    // dL/dz = (2/M) (t - x) .* lam (1 - t^2)
    Eigen::MatrixXd dz = 2.0 * inv_m * lam * ((t - x).array() * (1.0 - t.array().square()));

    SingleLayerGrad g;
    g.d_weights = dz * x.transpose();
    g.d_bias = dz.rowwise().sum();
    if (mask && !mask->empty()) mask->apply(g.d_weights);
    return g;
}

MultilayerGrad grad_loss_multilayer(const MultilayerNet& net, const PatternSet& patterns,
                                    const MultilayerFaultMask* masks) {
    Eigen::MatrixXd x = patterns_to_matrix(patterns);
    if (x.rows() != net.input_size())
        throw std::invalid_argument("grad_loss_multilayer: pattern length mismatch");
    const double inv_m = 1.0 / static_cast<double>(x.cols());

    Eigen::MatrixXd h = ((net.encoder * x).colwise() + net.encoder_bias).array().tanh();
    Eigen::MatrixXd y = ((net.decoder * h).colwise() + net.decoder_bias).array().tanh();

    Eigen::MatrixXd dy = 2.0 * inv_m * ((y - x).array() * (1.0 - y.array().square()));
    Eigen::MatrixXd dh =
        ((net.decoder.transpose() * dy).array() * (1.0 - h.array().square())).matrix();

    MultilayerGrad g;
    g.d_decoder = dy * h.transpose();
    g.d_decoder_bias = dy.rowwise().sum();
    g.d_encoder = dh * x.transpose();
    g.d_encoder_bias = dh.rowwise().sum();
    if (masks) {
        if (!masks->encoder.empty()) masks->encoder.apply(g.d_encoder);
        if (!masks->decoder.empty()) masks->decoder.apply(g.d_decoder);
    }
    return g;
}

namespace {

// One RMSProp accumulator per parameter tensor.
struct RmsState {
    Eigen::MatrixXd v;
    void step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, const TrainingConfig& cfg) {
        if (v.size() == 0) v = Eigen::MatrixXd::Zero(param.rows(), param.cols());
        v = cfg.rmsprop_decay * v.array().matrix() +
            (1.0 - cfg.rmsprop_decay) * grad.array().square().matrix();
        param.array() -=
            cfg.learning_rate * grad.array() / (v.array().sqrt() + cfg.rmsprop_epsilon);
    }
};

void plain_step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, double lr) {
    param -= lr * grad;
}

}  // namespace

std::pair<HopfieldNet, TrainingReport> train_adaptive_single(
    const PatternSet& patterns, const TrainingConfig& cfg, const std::optional<FaultMask>& mask) {
    Eigen::MatrixXd x = patterns_to_matrix(patterns);
    const Eigen::Index n = x.rows();
    const double inv_m = 1.0 / static_cast<double>(x.cols());

    auto rng = make_rng(cfg.seed);
    const double scale = cfg.init_scale > 0.0 ? cfg.init_scale : 1.0 / std::sqrt(double(n));

    HopfieldNet net;
    net.weights = init_weights(n, n, scale, rng);
    net.bias = Eigen::VectorXd::Zero(n);
    if (mask) mask->apply(net.weights);

    RmsState rms_w, rms_b;
    TrainingReport report;
    double loss = 0.0;
    const double lam = net.steepness;

    for (int step = 0; step < cfg.max_steps; ++step) {
        Eigen::MatrixXd t = (lam * ((net.weights * x).colwise() + net.bias)).array().tanh();
        Eigen::MatrixXd r = t - x;
        loss = r.squaredNorm() * inv_m;
        record_loss(report, step, loss, cfg.max_steps);
        report.steps_used = step;
        if (loss < cfg.loss_threshold) break;

        Eigen::MatrixXd dz = 2.0 * inv_m * lam * (r.array() * (1.0 - t.array().square()));
        Eigen::MatrixXd dw = dz * x.transpose();
        Eigen::VectorXd db = dz.rowwise().sum();
        if (mask) mask->apply(dw);

        if (cfg.optimizer == Optimizer::PlainGD) {
            plain_step(net.weights, dw, cfg.learning_rate);
            net.bias -= cfg.learning_rate * db;
        } else {
            rms_w.step(net.weights, dw, cfg);
            Eigen::MatrixXd b = net.bias, g = db;
            rms_b.step(b, g, cfg);
            net.bias = b;
        }
        if (mask) mask->apply(net.weights);
    }

    report.final_loss = loss;
    report.converged = loss < cfg.loss_threshold;
    if (!report.converged) report.steps_used = cfg.max_steps;
    return {std::move(net), std::move(report)};
}

std::pair<MultilayerNet, TrainingReport> train_adaptive_multilayer(
    const PatternSet& patterns, int hidden_dim, const TrainingConfig& cfg,
    const std::optional<MultilayerFaultMask>& masks) {
    if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
    Eigen::MatrixXd x = patterns_to_matrix(patterns);
    const Eigen::Index n = x.rows();
    const Eigen::Index nh = hidden_dim;
    const double inv_m = 1.0 / static_cast<double>(x.cols());

    auto rng = make_rng(cfg.seed);
    const double s1 = cfg.init_scale > 0.0 ? cfg.init_scale : 1.0 / std::sqrt(double(n));
    const double s2 = cfg.init_scale > 0.0 ? cfg.init_scale : 1.0 / std::sqrt(double(nh));

    MultilayerNet net;
    net.encoder = init_weights(nh, n, s1, rng);
    net.encoder_bias = Eigen::VectorXd::Zero(nh);
    net.decoder = init_weights(n, nh, s2, rng);
    net.decoder_bias = Eigen::VectorXd::Zero(n);
    if (masks) {
        masks->encoder.apply(net.encoder);
        masks->decoder.apply(net.decoder);
    }

    RmsState rms_w1, rms_b1, rms_w2, rms_b2;
    TrainingReport report;
    double loss = 0.0;

    for (int step = 0; step < cfg.max_steps; ++step) {
        Eigen::MatrixXd h = ((net.encoder * x).colwise() + net.encoder_bias).array().tanh();
        Eigen::MatrixXd y = ((net.decoder * h).colwise() + net.decoder_bias).array().tanh();
        Eigen::MatrixXd r = y - x;
        loss = r.squaredNorm() * inv_m;
        record_loss(report, step, loss, cfg.max_steps);
        report.steps_used = step;
        if (loss < cfg.loss_threshold) break;

        Eigen::MatrixXd dy = 2.0 * inv_m * (r.array() * (1.0 - y.array().square()));
        Eigen::MatrixXd dh =
            ((net.decoder.transpose() * dy).array() * (1.0 - h.array().square())).matrix();
        Eigen::MatrixXd dw2 = dy * h.transpose();
        Eigen::VectorXd db2 = dy.rowwise().sum();
        Eigen::MatrixXd dw1 = dh * x.transpose();
        Eigen::VectorXd db1 = dh.rowwise().sum();
        if (masks) {
            masks->encoder.apply(dw1);
            masks->decoder.apply(dw2);
        }

        if (cfg.optimizer == Optimizer::PlainGD) {
            plain_step(net.encoder, dw1, cfg.learning_rate);
            plain_step(net.decoder, dw2, cfg.learning_rate);
            net.encoder_bias -= cfg.learning_rate * db1;
            net.decoder_bias -= cfg.learning_rate * db2;
        } else {
            rms_w1.step(net.encoder, dw1, cfg);
            rms_w2.step(net.decoder, dw2, cfg);
            Eigen::MatrixXd b1 = net.encoder_bias, g1 = db1;
            rms_b1.step(b1, g1, cfg);
            net.encoder_bias = b1;
            Eigen::MatrixXd b2 = net.decoder_bias, g2 = db2;
            rms_b2.step(b2, g2, cfg);
            net.decoder_bias = b2;
        }
        if (masks) {
            masks->encoder.apply(net.encoder);
            masks->decoder.apply(net.decoder);
        }
    }

    report.final_loss = loss;
    report.converged = loss < cfg.loss_threshold;
    if (!report.converged) report.steps_used = cfg.max_steps;
    return {std::move(net), std::move(report)};
}

}  // namespace amsim
