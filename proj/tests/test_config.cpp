#include <stdexcept>
#include <string>

#include "biflow/config.hpp"
#include "doctest.h"

using namespace biflow;

TEST_CASE("empty config resolves to the documented defaults") {
    const ExperimentConfig cfg = parse_config("{}");
    CHECK(cfg.dataset.generator == "two-spirals");
    CHECK(cfg.dataset.n_per_class == 1000);
    CHECK(cfg.dataset.num_classes == 2);
    CHECK(cfg.dataset.noise_sigma == 0.02);
    CHECK(cfg.dataset.test_fraction == 0.25);
    CHECK(cfg.dataset.seed == 7);
    CHECK(cfg.hidden_widths == std::vector<std::size_t>{128, 128, 128, 128});
    CHECK(cfg.activation == Activation::Silu);
    CHECK(cfg.time_encoding == TimeEncoding::Raw);
    CHECK(cfg.train.epochs == 400);
    CHECK(cfg.train.batch_size == 128);
    CHECK(cfg.train.adam.lr == 1e-3);
    CHECK(cfg.train.objective == Objective::Symmetric);
    CHECK(cfg.solver.scheme == Scheme::Euler);
    CHECK(cfg.solver.steps == 20);
    CHECK(!cfg.solver.freeze_x);
    CHECK(cfg.classify_ensemble == 8);
    CHECK(cfg.bayes_n_mc == 64);
    CHECK(cfg.dim_y == 1);
}

TEST_CASE("nested keys override defaults") {
    const ExperimentConfig cfg = parse_config(R"({
        "dataset": {"n_per_class": 50, "seed": 3},
        "train": {"epochs": 7, "objective": "conditional-baseline"},
        "solver": {"scheme": "rk4", "steps": 5, "freeze_x": true},
        "network": {"hidden_widths": [32, 16], "activation": "tanh",
                    "time_encoding": "sinusoidal", "init_seed": 9},
        "seed": 77
    })");
    CHECK(cfg.dataset.n_per_class == 50);
    CHECK(cfg.dataset.seed == 3);
    CHECK(cfg.train.epochs == 7);
    CHECK(cfg.train.objective == Objective::ConditionalBaseline);
    CHECK(cfg.solver.scheme == Scheme::Rk4);
    CHECK(cfg.solver.steps == 5);
    CHECK(cfg.solver.freeze_x);
    CHECK(cfg.hidden_widths == std::vector<std::size_t>{32, 16});
    CHECK(cfg.activation == Activation::Tanh);
    CHECK(cfg.time_encoding == TimeEncoding::Sinusoidal);
    CHECK(cfg.init_seed == 9);
    CHECK(cfg.seed == 77);
}

TEST_CASE("unknown keys are named in the error") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"dataset": {"foo": 1}})"),
                         doctest::Contains("dataset.foo"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(R"({"velocity": 2})"), doctest::Contains("velocity"),
                         std::invalid_argument);
}

TEST_CASE("wrong types are named in the error") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"train": {"epochs": "many"}})"),
                         doctest::Contains("train.epochs"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(R"({"dataset": {"noise_sigma": []}})"),
                         doctest::Contains("dataset.noise_sigma"), std::invalid_argument);
}

TEST_CASE("invalid json is rejected") {
    CHECK_THROWS(parse_config("not json"));
    CHECK_THROWS(parse_config(""));
}

TEST_CASE("semantic validation") {
    CHECK_THROWS(parse_config(R"({"dataset": {"test_fraction": 1.5}})"));
    CHECK_THROWS(parse_config(R"({"codebook": {"beta": -0.25}})"));
    CHECK_THROWS(parse_config(R"({"train": {"lr": 0.0}})"));
    CHECK_THROWS(parse_config(R"({"solver": {"scheme": "heun"}})"));
    CHECK_THROWS(parse_config(R"({"network": {"hidden_widths": []}})"));
}

TEST_CASE("echoed config round-trips the resolved experiment") {
    const ExperimentConfig cfg = parse_config(R"({
        "dataset": {"n_per_class": 40},
        "train": {"epochs": 2},
        "codebook": {"beta": 0.3},
        "seed": 5
    })");
    const std::string echoed = config_to_json(cfg);
    const ExperimentConfig back = parse_config(echoed);
    CHECK(back.dataset.n_per_class == cfg.dataset.n_per_class);
    CHECK(back.train.epochs == cfg.train.epochs);
    CHECK(back.beta == 0.3);
    CHECK(back.seed == 5);
    CHECK(config_to_json(back) == echoed);
}

TEST_CASE("derived pieces agree with the config") {
    const ExperimentConfig cfg = parse_config(R"({"dataset": {"n_per_class": 30}})");
    const Dataset ds = make_dataset(cfg.dataset);
    CHECK(ds.size() == 60);
    CHECK(ds.num_classes == 2);

    const ClassCodebook cb = make_codebook(cfg);
    CHECK(cb.num_classes == 2);
    CHECK(cb.beta == 0.5);  // two-class default
    CHECK(cb.centers[0][0] == -1.0);
    CHECK(cb.centers[1][0] == 1.0);

    const VelocityModel model = make_model(cfg);
    CHECK(model.dim_x == 2);
    CHECK(model.dim_y == 1);
    CHECK(model.params.widths.front() == 4);
    CHECK(model.params.widths.back() == 3);
}

TEST_CASE("gaussian mixture config path") {
    const ExperimentConfig cfg = parse_config(R"({
        "dataset": {"generator": "gaussian-mixture", "num_classes": 4,
                     "k_components": 8, "n_per_class": 25}
    })");
    const Dataset ds = make_dataset(cfg.dataset);
    CHECK(ds.num_classes == 4);
    CHECK(ds.size() == 100);
    const ClassCodebook cb = make_codebook(cfg);
    CHECK(cb.num_classes == 4);
}
