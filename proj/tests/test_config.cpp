#include <doctest.h>

#include <algorithm>

#include "amsim/config.hpp"

using namespace amsim;

namespace {

const std::string kMinimal =
    "experiment = retrieve\n"
    "dataset.source = random\n";

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) {
        return e.find(needle) != std::string::npos;
    });
}

std::vector<std::string> errors_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.errors;
    }
    return {};
}

}  // namespace

TEST_CASE("required keys") {
    SUBCASE("empty config names every missing requirement") {
        auto errs = errors_of("");
        CHECK(mentions(errs, "missing required key 'experiment'"));
        CHECK(mentions(errs, "missing required key 'dataset.source'"));
    }

    SUBCASE("mnist source additionally requires an image path") {
        auto errs = errors_of("experiment = retrieve\ndataset.source = mnist\n");
        CHECK(mentions(errs, "dataset.images"));
        CHECK_NOTHROW(parse_config(
            "experiment = retrieve\ndataset.source = mnist\ndataset.images = a/b\n"));
    }

    SUBCASE("random source needs no paths") { CHECK_NOTHROW(parse_config(kMinimal)); }
}

TEST_CASE("defaults") {
    ExperimentConfig cfg = parse_config(kMinimal);
    CHECK(cfg.rule == LearningRule::AdaptiveSingle);
    CHECK(cfg.seed == 0);
    CHECK(cfg.threads == 1);
    CHECK(cfg.dataset.kind == PatternKind::Binary);
    CHECK(cfg.dataset.target_side == 8);
    CHECK(cfg.crossbar.g_min_us == 0.0);
    CHECK(cfg.crossbar.g_max_us == 150.0);
    CHECK(cfg.crossbar.write_tolerance_us == 5.0);
    CHECK(cfg.crossbar.read_voltage_v == 0.2);
    CHECK(cfg.crossbar.program_error_mean_us == 0.108);
    CHECK(cfg.crossbar.program_error_std_us == 3.894);

    // Rule-dependent training defaults resolve lazily.
    TrainingConfig single = cfg.resolved_training();
    CHECK(single.learning_rate == 3e-2);
    CHECK(single.max_steps == 10000);
    CHECK(single.loss_threshold == 1e-8);
    CHECK(single.optimizer == Optimizer::PlainGD);

    ExperimentConfig multi = parse_config(kMinimal + "rule = adaptive_multi\n");
    TrainingConfig mt = multi.resolved_training();
    CHECK(mt.learning_rate == 3e-4);
    CHECK(mt.max_steps == 60000);
    CHECK(mt.optimizer == Optimizer::RMSProp);

    // Dimension-dependent defaults.
    CHECK(cfg.pattern_dim() == 64);
    CHECK(cfg.resolved_hidden_dim() == 32);
    CHECK(cfg.capacity.pattern_step == 2);    // N/32
    CHECK(cfg.capacity.max_patterns == 128);  // 2N
}

TEST_CASE("overrides") {
    ExperimentConfig cfg = parse_config(kMinimal +
                                        "rule = adaptive_multi\n"
                                        "net.hidden = 16\n"
                                        "train.rate = 0.01\n"
                                        "train.optimizer = plain\n"
                                        "dataset.side = 10\n"
                                        "capacity.step = 5\n"
                                        "scaling.sides = 8, 12\n"
                                        "faults.fractions = 0, 0.25\n");
    CHECK(cfg.resolved_hidden_dim() == 16);
    CHECK(cfg.resolved_training().learning_rate == 0.01);
    CHECK(cfg.resolved_training().optimizer == Optimizer::PlainGD);
    CHECK(cfg.pattern_dim() == 100);
    CHECK(cfg.capacity.pattern_step == 5);
    CHECK(cfg.scaling_sides == std::vector<int>{8, 12});
    CHECK(cfg.fault_fractions == std::vector<double>{0.0, 0.25});
}

TEST_CASE("comments and whitespace") {
    CHECK_NOTHROW(parse_config("# leading comment\n"
                               "  experiment   =   retrieve  # trailing\n"
                               "\n"
                               "dataset.source=random\n"));
}

TEST_CASE("error reporting") {
    SUBCASE("unknown key") { CHECK(mentions(errors_of(kMinimal + "no.such = 1\n"), "unknown key 'no.such'")); }

    SUBCASE("duplicate key") {
        CHECK(mentions(errors_of(kMinimal + "seed = 1\nseed = 2\n"), "duplicate key 'seed'"));
    }

    SUBCASE("bad enum values") {
        CHECK(mentions(errors_of("experiment = flying\ndataset.source = random\n"),
                       "unknown experiment kind"));
        CHECK(mentions(errors_of(kMinimal + "rule = oja\n"), "unknown learning rule"));
        CHECK(mentions(errors_of(kMinimal + "retrieve.mode = diagonal\n"), "retrieve.mode"));
    }

    SUBCASE("type mismatches") {
        CHECK(mentions(errors_of(kMinimal + "threads = many\n"), "expected integer"));
        CHECK(mentions(errors_of(kMinimal + "corrupt.sigma = big\n"), "expected number"));
        CHECK(mentions(errors_of(kMinimal + "crossbar.emulated = maybe\n"), "expected boolean"));
    }

    SUBCASE("constraint violations") {
        CHECK(mentions(errors_of(kMinimal + "corrupt.flip_prob = 1.5\n"), "[0,1]"));
        CHECK(mentions(errors_of(kMinimal + "capacity.threshold = 0\n"), "(0,1]"));
        CHECK(mentions(errors_of(kMinimal + "threads = 0\n"), ">= 1"));
    }

    SUBCASE("malformed line") {
        CHECK(mentions(errors_of(kMinimal + "just words\n"), "line 3"));
    }

    SUBCASE("every problem reported in one pass") {
        auto errs = errors_of(
            "rule = oja\n"
            "threads = many\n"
            "threads = 2\n"
            "no.such = 1\n");
        CHECK(errs.size() == 6);  // rule, type, duplicate, unknown, 2 missing required
    }
}

TEST_CASE("manifest round trip") {
    ExperimentConfig cfg = parse_config(kMinimal +
                                        "rule = pseudo_inverse\n"
                                        "seed = 1234\n"
                                        "dataset.side = 10\n"
                                        "corrupt.flip_prob = 0.1\n"
                                        "cost.e_mvm = 2.5e-12\n");
    const std::string manifest = cfg.to_text();
    ExperimentConfig back = parse_config(manifest);
    CHECK(back.to_text() == manifest);
    CHECK(back.rule == LearningRule::PseudoInverse);
    CHECK(back.seed == 1234);
    CHECK(back.corruption.flip_prob == 0.1);
    CHECK(back.cost.e_mvm_per_cell_j == 2.5e-12);
}
