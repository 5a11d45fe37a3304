#include "biflow/datasets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "biflow/io.hpp"
#include "biflow/rng.hpp"

namespace biflow {

Dataset two_spirals_raw(const SpiralConfig& config) {
    if (config.n_per_class < 1) throw std::invalid_argument("two_spirals: n_per_class must be >= 1");
    if (!(config.theta_lo > 0.0) || !(config.theta_hi > config.theta_lo)) {
        throw std::invalid_argument("two_spirals: need theta_hi > theta_lo > 0");
    }
    if (config.noise_sigma < 0.0) throw std::invalid_argument("two_spirals: negative noise_sigma");

    SeededRng rng(config.seed);
    Dataset ds;
    ds.dim_x = 2;
    ds.num_classes = 2;
    ds.generator = "two_spirals";
    ds.seed = config.seed;
    ds.points.reserve(2 * config.n_per_class);
    ds.labels.reserve(2 * config.n_per_class);
    for (std::size_t i = 0; i < config.n_per_class; ++i) {
        const double u = rng.uniform();
        const double theta = config.theta_lo + (config.theta_hi - config.theta_lo) * u;
        const double r = theta / config.theta_hi;
        const double bx = r * std::cos(theta);
        const double by = r * std::sin(theta);
        ds.points.push_back({bx + config.noise_sigma * rng.normal(),
                             by + config.noise_sigma * rng.normal()});
        ds.labels.push_back(0);
        ds.points.push_back({-bx + config.noise_sigma * rng.normal(),
                             -by + config.noise_sigma * rng.normal()});
        ds.labels.push_back(1);
    }
    return ds;
}

Dataset two_spirals(const SpiralConfig& config) {
    return standardize(two_spirals_raw(config));
}

Dataset standardize(Dataset dataset) {
    if (dataset.points.empty()) return dataset;
    const std::size_t n = dataset.points.size();
    const std::size_t dim = dataset.dim_x;
    std::vector<double> mean(dim, 0.0);
    for (const auto& p : dataset.points) {
        for (std::size_t j = 0; j < dim; ++j) mean[j] += p[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    std::vector<double> var(dim, 0.0);
    for (const auto& p : dataset.points) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = p[j] - mean[j];
            var[j] += d * d;
        }
    }
    for (double& v : var) v /= static_cast<double>(n);
    for (std::size_t j = 0; j < dim; ++j) {
        if (!(var[j] > 0.0)) throw std::runtime_error("standardize: degenerate coordinate " +
                                                      std::to_string(j));
    }
    for (auto& p : dataset.points) {
        for (std::size_t j = 0; j < dim; ++j) p[j] = (p[j] - mean[j]) / std::sqrt(var[j]);
    }
    return dataset;
}

std::vector<std::vector<double>> mixture_component_means(std::size_t k_components) {
    std::vector<std::vector<double>> means;
    for (std::size_t j = 0; j < k_components; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) /
                             static_cast<double>(k_components);
        means.push_back({std::cos(angle), std::sin(angle)});
    }
    return means;
}

Dataset gaussian_mixture(std::size_t k_components, std::size_t n_per_class,
                         std::size_t num_classes, std::uint64_t seed) {
    if (num_classes < 1 || n_per_class < 1) {
        throw std::invalid_argument("gaussian_mixture: counts must be >= 1");
    }
    if (k_components < num_classes) {
        throw std::invalid_argument("gaussian_mixture: need k_components >= num_classes");
    }
    constexpr double kStd = 0.05;
    const auto means = mixture_component_means(k_components);

    // Components are dealt to classes round-robin: component j -> class j % C.
    std::vector<std::vector<std::size_t>> class_components(num_classes);
    for (std::size_t j = 0; j < k_components; ++j) class_components[j % num_classes].push_back(j);

    SeededRng rng(seed);
    Dataset ds;
    ds.dim_x = 2;
    ds.num_classes = num_classes;
    ds.generator = "gaussian_mixture";
    ds.seed = seed;
    for (std::size_t c = 0; c < num_classes; ++c) {
        const auto& comps = class_components[c];
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const std::size_t comp = comps[i % comps.size()];
            ds.points.push_back({means[comp][0] + kStd * rng.normal(),
                                 means[comp][1] + kStd * rng.normal()});
            ds.labels.push_back(c);
        }
    }
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction,
                                  std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw std::invalid_argument("split: test_fraction must lie strictly between 0 and 1");
    }
    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    SeededRng rng(seed);
    rng.shuffle(order);
    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

    Dataset test = dataset;
    test.points.clear();
    test.labels.clear();
    Dataset train = test;
    for (std::size_t i = 0; i < n; ++i) {
        Dataset& dst = (i < n_test) ? test : train;
        dst.points.push_back(dataset.points[order[i]]);
        dst.labels.push_back(dataset.labels[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

std::string dataset_to_csv(const Dataset& dataset) {
    return points_to_csv(dataset.points, &dataset.labels);
}

Dataset dataset_from_csv(const std::string& text) {
    PointsCsv csv = points_from_csv(text);
    if (!csv.has_labels) throw std::runtime_error("dataset csv: label column missing");
    Dataset ds;
    ds.points = std::move(csv.points);
    ds.labels = std::move(csv.labels);
    ds.dim_x = ds.points.empty() ? 0 : ds.points.front().size();
    std::size_t max_label = 0;
    for (std::size_t l : ds.labels) max_label = std::max(max_label, l);
    ds.num_classes = ds.labels.empty() ? 0 : max_label + 1;
    ds.generator = "csv";
    return ds;
}

}  // namespace biflow
