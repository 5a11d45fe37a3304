#pragma once

#include <cstddef>
#include <vector>

#include "biflow/rng.hpp"

namespace biflow {

/// Discrete class index <-> continuous label code in [-1, +1]^dim_y.
/// Dequantization adds per-coordinate uniform noise of half-width beta;
/// decoding picks the nearest center.
struct ClassCodebook {
    std::size_t num_classes = 0;
    std::size_t dim_y = 0;
    std::vector<std::vector<double>> centers;
    double beta = 0.0;
    double min_center_distance = 0.0;
    // true when beta >= half the minimum pairwise center distance, so a
    // dequantized draw can land nearer a foreign center.
    bool ambiguous = false;
};

/// Equally spaced scalar codes -1 + 2i/(n-1), replicated across dim_y.
ClassCodebook build_codebook(std::size_t num_classes, std::size_t dim_y, double beta);

/// Default half-width: 0.5 for two classes (supports [-1.5,-0.5] and
/// [+0.5,+1.5]), otherwise 0.4x the center gap.
double default_beta(std::size_t num_classes);

/// center(class_idx) + U(-beta, +beta) per coordinate.
std::vector<double> dequantize(const ClassCodebook& codebook, std::size_t class_idx,
                               SeededRng& rng);

/// Nearest center in L2; ties go to the lowest class index. Total function.
std::size_t decode(const ClassCodebook& codebook, const std::vector<double>& y_pred);

/// decode() of the coordinate-wise mean of the predictions.
std::size_t decode_ensemble(const ClassCodebook& codebook,
                            const std::vector<std::vector<double>>& y_preds);

}  // namespace biflow
