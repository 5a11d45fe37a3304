#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace biflow {

/// Labeled point cloud plus the generation facts needed to rebuild it.
struct Dataset {
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> labels;
    std::size_t dim_x = 0;
    std::size_t num_classes = 0;
    std::string generator;
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
};

struct SpiralConfig {
    std::size_t n_per_class = 1000;
    double theta_lo = 3.14159265358979323846;        // pi
    double theta_hi = 4.0 * 3.14159265358979323846;  // 4 pi, 1.5 turns
    double noise_sigma = 0.02;
    std::uint64_t seed = 7;
};

/// Two interleaved spirals, class B the point reflection of class A. Both
/// classes share the angle draws, so with sigma = 0 the B set is exactly the
/// negated A set. Points come out interleaved A,B,A,B,...
Dataset two_spirals_raw(const SpiralConfig& config);

/// two_spirals_raw followed by standardize().
Dataset two_spirals(const SpiralConfig& config);

/// Shift/scale every coordinate to zero mean, unit variance over the whole
/// set (population variance).
Dataset standardize(Dataset dataset);

/// Gaussian blobs (std 0.05) with means equally spaced on the unit circle,
/// components assigned to classes round-robin.
Dataset gaussian_mixture(std::size_t k_components, std::size_t n_per_class,
                         std::size_t num_classes, std::uint64_t seed);

std::vector<std::vector<double>> mixture_component_means(std::size_t k_components);

/// Seeded shuffle, then the first round(fraction*N) points become the test
/// set. Plain random split; per-class balance is not enforced.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction,
                                  std::uint64_t seed);

std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(const std::string& text);

}  // namespace biflow
