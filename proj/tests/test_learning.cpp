#include <doctest.h>

#include <cmath>

#include "amsim/data.hpp"
#include "amsim/learning.hpp"
#include "amsim/network.hpp"
#include "amsim/rng.hpp"

using namespace amsim;

namespace {

Pattern binary(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return Pattern(std::move(x), PatternKind::Binary);
}

bool is_fixed_point(const HopfieldNet& net, const Pattern& p) {
    return update_sync(net, p, Activation::Sign).values == p.values;
}

// Central finite differences over every parameter entry.
template <typename LossFn>
double fd_derivative(LossFn loss, double& param) {
    const double h = 1e-6;
    const double orig = param;
    param = orig + h;
    const double up = loss();
    param = orig - h;
    const double down = loss();
    param = orig;
    return (up - down) / (2 * h);
}

}  // namespace

TEST_CASE("hebbian rule") {
    SUBCASE("single pattern gives scaled outer product with zero diagonal") {
        PatternSet set = {binary({1, 1, -1, -1})};
        HopfieldNet net = train_hebbian(set);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double expect =
                    i == j ? 0.0 : set[0].values[i] * set[0].values[j] / 4.0;
                CHECK(net.weights(i, j) == doctest::Approx(expect));
            }
        CHECK(is_fixed_point(net, set[0]));
    }

    SUBCASE("duplicated pattern doubles off-diagonal weights") {
        PatternSet one = {binary({1, -1, 1, 1})};
        PatternSet two = {one[0], one[0]};
        HopfieldNet a = train_hebbian(one);
        HopfieldNet b = train_hebbian(two);
        CHECK((b.weights - 2.0 * a.weights).norm() == doctest::Approx(0.0));
        CHECK(is_fixed_point(b, one[0]));
    }

    SUBCASE("continuous patterns rejected") {
        PatternSet set = {Pattern(Eigen::VectorXd::Constant(4, 0.5), PatternKind::Continuous)};
        CHECK_THROWS_AS(train_hebbian(set), std::invalid_argument);
    }
}

TEST_CASE("storkey rule") {
    SUBCASE("first pattern from zero weights matches hebbian") {
        PatternSet set = {binary({1, 1, -1, -1})};
        CHECK((train_storkey(set).weights - train_hebbian(set).weights).norm() ==
              doctest::Approx(0.0));
    }

    SUBCASE("stored patterns are fixed points at low load") {
        PatternSet set = gen_random_patterns(3, 16, PatternKind::Binary, 42);
        HopfieldNet net = train_storkey(set);
        for (const auto& p : set) CHECK(is_fixed_point(net, p));
    }
}

TEST_CASE("pseudo-inverse rule") {
    SUBCASE("orthogonal patterns reduce to hebbian") {
        PatternSet set = {binary({1, 1, 1, 1}), binary({1, -1, 1, -1})};
        HopfieldNet pi = train_pseudo_inverse(set);
        HopfieldNet heb = train_hebbian(set);
        // Hebbian zeroes the diagonal; compare off-diagonal entries.
        Eigen::MatrixXd diff = pi.weights - heb.weights;
        diff.diagonal().setZero();
        CHECK(diff.norm() == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("single pattern") {
        PatternSet set = {binary({1, -1, 1, -1})};
        HopfieldNet net = train_pseudo_inverse(set);
        CHECK((net.weights * set[0].values - set[0].values).norm() ==
              doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("stored patterns are exact linear fixed points") {
        PatternSet set = gen_random_patterns(12, 32, PatternKind::Binary, 7);
        HopfieldNet net = train_pseudo_inverse(set);
        for (const auto& p : set)
            CHECK((net.weights * p.values - p.values).lpNorm<Eigen::Infinity>() < 1e-9);
    }

    SUBCASE("duplicate pattern raises singular error naming the index") {
        PatternSet set = {binary({1, 1, -1, -1}), binary({1, -1, 1, -1}),
                          binary({1, 1, -1, -1})};
        try {
            train_pseudo_inverse(set);
            FAIL("expected SingularPatternsError");
        } catch (const SingularPatternsError& e) {
            REQUIRE(!e.offending_indices.empty());
            // One member of the duplicate pair must be reported.
            const int idx = e.offending_indices.front();
            CHECK((idx == 0 || idx == 2));
        }
    }
}

TEST_CASE("adaptive loss single-layer") {
    HopfieldNet net;
    net.weights = Eigen::MatrixXd::Zero(2, 2);
    net.bias = Eigen::VectorXd::Zero(2);
    PatternSet set = {binary({1, -1})};
    CHECK(adaptive_loss_single(net, set) == doctest::Approx(2.0));

    SUBCASE("invariant under pattern reordering") {
        PatternSet many = gen_random_patterns(4, 8, PatternKind::Binary, 3);
        HopfieldNet rnet;
        rnet.weights = Eigen::MatrixXd::Random(8, 8);
        rnet.bias = Eigen::VectorXd::Random(8);
        const double a = adaptive_loss_single(rnet, many);
        std::reverse(many.begin(), many.end());
        CHECK(adaptive_loss_single(rnet, many) == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradients match finite differences") {
    auto rng = make_rng(11);

    SUBCASE("single layer") {
        for (int inst = 0; inst < 10; ++inst) {
            const int n = 4;
            PatternSet set = gen_random_patterns(2, n, PatternKind::Binary, 100 + inst);
            HopfieldNet net;
            net.weights = Eigen::MatrixXd::Random(n, n) * 0.5;
            net.bias = Eigen::VectorXd::Random(n) * 0.1;

            SingleLayerGrad g = grad_loss_single(net, set);
            auto loss = [&] { return adaptive_loss_single(net, set); };
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double fd = fd_derivative(loss, net.weights(i, j));
                    CHECK(g.d_weights(i, j) ==
                          doctest::Approx(fd).epsilon(1e-5));
                }
                const double fd = fd_derivative(loss, net.bias(i));
                CHECK(g.d_bias(i) == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }

    SUBCASE("multilayer") {
        for (int inst = 0; inst < 10; ++inst) {
            const int n = 4, nh = 3;
            PatternSet set = gen_random_patterns(2, n, PatternKind::Binary, 200 + inst);
            MultilayerNet net;
            net.encoder = Eigen::MatrixXd::Random(nh, n) * 0.5;
            net.encoder_bias = Eigen::VectorXd::Random(nh) * 0.1;
            net.decoder = Eigen::MatrixXd::Random(n, nh) * 0.5;
            net.decoder_bias = Eigen::VectorXd::Random(n) * 0.1;

            MultilayerGrad g = grad_loss_multilayer(net, set);
            auto loss = [&] { return adaptive_loss_multilayer(net, set); };
            for (int i = 0; i < nh; ++i)
                for (int j = 0; j < n; ++j)
                    CHECK(g.d_encoder(i, j) ==
                          doctest::Approx(fd_derivative(loss, net.encoder(i, j))).epsilon(1e-5));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < nh; ++j)
                    CHECK(g.d_decoder(i, j) ==
                          doctest::Approx(fd_derivative(loss, net.decoder(i, j))).epsilon(1e-5));
            for (int i = 0; i < nh; ++i)
                CHECK(g.d_encoder_bias(i) ==
                      doctest::Approx(fd_derivative(loss, net.encoder_bias(i))).epsilon(1e-5));
            for (int i = 0; i < n; ++i)
                CHECK(g.d_decoder_bias(i) ==
                      doctest::Approx(fd_derivative(loss, net.decoder_bias(i))).epsilon(1e-5));
        }
    }
    (void)rng;
}

TEST_CASE("masked gradient entries are exactly zero") {
    const int n = 4;
    PatternSet set = gen_random_patterns(2, n, PatternKind::Binary, 9);
    HopfieldNet net;
    net.weights = Eigen::MatrixXd::Random(n, n);
    net.bias = Eigen::VectorXd::Zero(n);
    FaultMask mask;
    mask.stuck.setConstant(n, n, false);
    mask.stuck(1, 2) = true;
    mask.stuck(3, 0) = true;
    SingleLayerGrad g = grad_loss_single(net, set, &mask);
    CHECK(g.d_weights(1, 2) == 0.0);
    CHECK(g.d_weights(3, 0) == 0.0);
}

TEST_CASE("train_adaptive_single") {
    SUBCASE("two orthogonal patterns become fixed points") {
        PatternSet set = {binary({1, 1, 1, 1}), binary({1, -1, 1, -1})};
        TrainingConfig cfg = TrainingConfig::single_layer();
        cfg.seed = 1;
        auto [net, report] = train_adaptive_single(set, cfg);
        CHECK(report.final_loss < report.loss_history.front());
        for (const auto& p : set) CHECK(is_fixed_point(net, p));
    }

    SUBCASE("loss threshold reachable with the adaptive optimizer") {
        // Plain GD's step vanishes quadratically near tanh saturation, so
        // the 1e-8 stop fires only under RMSProp.
        PatternSet set = {binary({1, 1, 1, 1}), binary({1, -1, 1, -1})};
        TrainingConfig cfg = TrainingConfig::single_layer();
        cfg.optimizer = Optimizer::RMSProp;
        cfg.seed = 1;
        auto [net, report] = train_adaptive_single(set, cfg);
        CHECK(report.converged);
        CHECK(report.final_loss < cfg.loss_threshold);
        for (const auto& p : set) CHECK(is_fixed_point(net, p));
    }

    SUBCASE("masked weights stay exactly zero and training still converges") {
        PatternSet set = gen_random_patterns(3, 16, PatternKind::Binary, 5);
        FaultMask mask;
        mask.stuck.setConstant(16, 16, false);
        auto rng = make_rng(17);
        std::bernoulli_distribution coin(0.3);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) mask.stuck(i, j) = coin(rng);

        TrainingConfig cfg = TrainingConfig::single_layer();
        cfg.seed = 2;
        auto [net, report] = train_adaptive_single(set, cfg, mask);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j)
                if (mask.stuck(i, j)) CHECK(net.weights(i, j) == 0.0);
        for (const auto& p : set) CHECK(is_fixed_point(net, p));
    }

    SUBCASE("bitwise deterministic per seed") {
        PatternSet set = gen_random_patterns(4, 8, PatternKind::Binary, 77);
        TrainingConfig cfg = TrainingConfig::single_layer();
        cfg.max_steps = 200;
        cfg.seed = 31;
        auto [a, ra] = train_adaptive_single(set, cfg);
        auto [b, rb] = train_adaptive_single(set, cfg);
        CHECK(a.weights == b.weights);
        CHECK(a.bias == b.bias);
        CHECK(ra.final_loss == rb.final_loss);
    }
}

TEST_CASE("train_adaptive_multilayer") {
    SUBCASE("stored patterns reproduced by the forward map") {
        PatternSet set = gen_random_patterns(4, 16, PatternKind::Binary, 21);
        TrainingConfig cfg = TrainingConfig::multilayer();
        cfg.max_steps = 20000;
        cfg.seed = 3;
        auto [net, report] = train_adaptive_multilayer(set, 16, cfg);
        CHECK(report.converged);
        for (const auto& p : set) {
            Pattern y = forward_multilayer(net, p);
            CHECK((y.values - p.values).lpNorm<Eigen::Infinity>() < 1e-3);
        }
    }

    SUBCASE("wider hidden layer reaches threshold in fewer steps") {
        PatternSet set = gen_random_patterns(6, 16, PatternKind::Binary, 8);
        TrainingConfig cfg = TrainingConfig::multilayer();
        cfg.max_steps = 30000;
        cfg.seed = 4;
        auto [wide_net, wide] = train_adaptive_multilayer(set, 16, cfg);
        auto [narrow_net, narrow] = train_adaptive_multilayer(set, 4, cfg);
        CHECK(wide.steps_used < narrow.steps_used);
    }

    SUBCASE("masked weights pinned to zero") {
        PatternSet set = gen_random_patterns(3, 8, PatternKind::Binary, 55);
        MultilayerFaultMask masks;
        masks.encoder.stuck.setConstant(4, 8, false);
        masks.decoder.stuck.setConstant(8, 4, false);
        masks.encoder.stuck(0, 0) = true;
        masks.decoder.stuck(7, 3) = true;
        TrainingConfig cfg = TrainingConfig::multilayer();
        cfg.max_steps = 2000;
        auto [net, report] = train_adaptive_multilayer(set, 4, cfg, masks);
        CHECK(net.encoder(0, 0) == 0.0);
        CHECK(net.decoder(7, 3) == 0.0);
    }
}
