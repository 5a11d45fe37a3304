#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biflow/codec.hpp"
#include "biflow/datasets.hpp"
#include "biflow/flow.hpp"
#include "biflow/nn.hpp"
#include "biflow/ode.hpp"

namespace biflow {

struct DatasetSpec {
    std::string generator = "two-spirals";  // or "gaussian-mixture"
    std::size_t n_per_class = 1000;
    std::size_t num_classes = 2;
    double theta_lo = 0.0;  // 0 means "use spiral default" (pi)
    double theta_hi = 0.0;  // 0 means 4*pi
    double noise_sigma = 0.02;
    std::size_t k_components = 8;  // gaussian-mixture only
    std::uint64_t seed = 7;
    double test_fraction = 0.25;
    std::uint64_t split_seed = 7;
};

struct ExperimentConfig {
    DatasetSpec dataset;

    std::size_t codebook_classes = 0;  // 0 means "match the dataset"
    std::size_t dim_y = 1;
    double beta = 0.0;  // 0 means "resolved default for the class count"

    std::vector<std::size_t> hidden_widths = {128, 128, 128, 128};
    Activation activation = Activation::Silu;
    TimeEncoding time_encoding = TimeEncoding::Raw;
    std::uint64_t init_seed = 1;

    TrainConfig train{.epochs = 400};
    SolverConfig solver;

    std::size_t classify_ensemble = 8;
    std::size_t bayes_n_mc = 64;

    std::uint64_t seed = 0;  // runtime stream for sampling / classification
    std::string out_dir = "out";
};

// Parses the JSON config text. Unknown keys and wrong types are errors that
// name the offending field. Missing keys take the defaults above.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Serializes with every default resolved, including the derived codebook
// (centers, beta, min center distance), so the echoed file fully describes
// the experiment.
std::string config_to_json(const ExperimentConfig& config);

Dataset make_dataset(const DatasetSpec& spec);
ClassCodebook make_codebook(const ExperimentConfig& config);
VelocityModel make_model(const ExperimentConfig& config);

}  // namespace biflow
