#include "amsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "amsim/rng.hpp"

namespace amsim {

namespace {

void check_dims(const HopfieldNet& net, const Pattern& state) {
    if (net.weights.rows() != net.weights.cols())
        throw std::invalid_argument("HopfieldNet: weight matrix must be square");
    if (net.bias.size() != net.weights.rows())
        throw std::invalid_argument("HopfieldNet: bias length does not match weights");
    if (state.size() != net.size())
        throw std::invalid_argument("state length does not match network size");
}

double sign_or_keep(double field, double previous) {
    if (field > 0.0) return 1.0;
    if (field < 0.0) return -1.0;
    return previous;
}

}  // namespace

double energy(const HopfieldNet& net, const Pattern& state) {
    check_dims(net, state);
    const Eigen::VectorXd& x = state.values;
    return -0.5 * x.dot(net.weights * x) + net.bias.dot(x);
}

Pattern update_sync(const HopfieldNet& net, const Pattern& state, Activation act) {
    check_dims(net, state);
    Eigen::VectorXd field = net.weights * state.values + net.bias;
    Pattern out = state;
    if (act == Activation::Sign) {
        for (Eigen::Index i = 0; i < field.size(); ++i)
            out.values[i] = sign_or_keep(field[i], state.values[i]);
    } else {
        out.values = (net.steepness * field).array().tanh();
        out.kind = PatternKind::Continuous;
    }
    return out;
}

Pattern update_async_sweep(const HopfieldNet& net, const Pattern& state,
                           const std::vector<int>& order, Activation act) {
    check_dims(net, state);
    const Eigen::Index n = net.size();
    if (static_cast<Eigen::Index>(order.size()) != n)
        throw std::invalid_argument("update_async_sweep: order length mismatch");
    std::vector<bool> seen(order.size(), false);
    for (int idx : order) {
        if (idx < 0 || idx >= n || seen[idx])
            throw std::invalid_argument("update_async_sweep: order is not a permutation");
        seen[idx] = true;
    }

    Pattern out = state;
    for (int i : order) {
        const double field = net.weights.row(i).dot(out.values) + net.bias[i];
        if (act == Activation::Sign)
            out.values[i] = sign_or_keep(field, out.values[i]);
        else
            out.values[i] = std::tanh(net.steepness * field);
    }
    return out;
}

Pattern forward_multilayer(const MultilayerNet& net, const Pattern& input) {
    if (input.size() != net.input_size())
        throw std::invalid_argument("forward_multilayer: input length mismatch");
    Eigen::VectorXd h = (net.encoder * input.values + net.encoder_bias).array().tanh();
    Eigen::VectorXd y = (net.decoder * h + net.decoder_bias).array().tanh();
    return Pattern(std::move(y), PatternKind::Continuous);
}

namespace {

// Shared retrieval loop; `step` produces the next state from the current
// one, `energy_fn` is empty for multilayer nets.
RetrievalTrace retrieve_impl(const Pattern& input, const RetrievalConfig& cfg, PatternKind kind,
                             const std::function<Pattern(const Pattern&, int)>& step,
                             const std::function<double(const Pattern&)>& energy_fn) {
    RetrievalTrace trace;
    trace.states.push_back(input);
    if (energy_fn) trace.energies.push_back(energy_fn(input));

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        Pattern next = step(trace.states.back(), it);
        trace.states.push_back(next);
        if (energy_fn) trace.energies.push_back(energy_fn(next));
        trace.iterations_used = it;

        const Eigen::VectorXd& cur = trace.states[trace.states.size() - 1].values;
        const Eigen::VectorXd& prev = trace.states[trace.states.size() - 2].values;
        if (kind == PatternKind::Binary) {
            if (cur == prev) {
                trace.converged = true;
                return trace;
            }
            if (trace.states.size() >= 3 && cur == trace.states[trace.states.size() - 3].values) {
                trace.cycle_detected = true;
                // Resolve the 2-cycle to its lower-energy member when energy
                // is defined; otherwise keep the earlier state of the pair.
                if (energy_fn) {
                    const std::size_t k = trace.energies.size();
                    if (trace.energies[k - 2] < trace.energies[k - 1]) {
                        trace.states.pop_back();
                        trace.energies.pop_back();
                        trace.iterations_used -= 1;
                    }
                } else {
                    trace.states.pop_back();
                    trace.iterations_used -= 1;
                }
                return trace;
            }
        } else {
            if ((cur - prev).lpNorm<Eigen::Infinity>() < cfg.continuous_tolerance) {
                trace.converged = true;
                return trace;
            }
        }
    }
    return trace;
}

}  // namespace

RetrievalTrace retrieve(const HopfieldNet& net, const Pattern& input, const RetrievalConfig& cfg) {
    check_dims(net, input);
    const PatternKind kind =
        (cfg.activation == Activation::Sign) ? PatternKind::Binary : PatternKind::Continuous;

    auto rng = make_rng(cfg.seed);
    auto step = [&](const Pattern& s, int) {
        if (cfg.mode == UpdateMode::Synchronous) return update_sync(net, s, cfg.activation);
        std::vector<int> order(static_cast<std::size_t>(net.size()));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        return update_async_sweep(net, s, order, cfg.activation);
    };
    auto energy_fn = [&net](const Pattern& s) { return energy(net, s); };
    return retrieve_impl(input, cfg, kind, step, energy_fn);
}

RetrievalTrace retrieve(const MultilayerNet& net, const Pattern& input,
                        const RetrievalConfig& cfg) {
    const PatternKind kind =
        (cfg.activation == Activation::Sign) ? PatternKind::Binary : PatternKind::Continuous;
    auto step = [&](const Pattern& s, int) {
        Pattern y = forward_multilayer(net, s);
        if (cfg.activation == Activation::Sign) {
            for (Eigen::Index i = 0; i < y.values.size(); ++i)
                y.values[i] = sign_or_keep(y.values[i], s.values[i]);
            y.kind = PatternKind::Binary;
        }
        return y;
    };
    return retrieve_impl(input, cfg, kind, step, {});
}

RetrievalTrace retrieve(const AnyNet& net, const Pattern& input, const RetrievalConfig& cfg) {
    return std::visit([&](const auto& n) { return retrieve(n, input, cfg); }, net);
}

}  // namespace amsim
