#include "biflow/codec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace biflow {

ClassCodebook build_codebook(std::size_t num_classes, std::size_t dim_y, double beta) {
    if (num_classes < 2) throw std::invalid_argument("build_codebook: need at least 2 classes");
    if (dim_y < 1) throw std::invalid_argument("build_codebook: dim_y must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("build_codebook: beta must be positive");

    ClassCodebook cb;
    cb.num_classes = num_classes;
    cb.dim_y = dim_y;
    cb.beta = beta;
    for (std::size_t i = 0; i < num_classes; ++i) {
        const double code =
            -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(num_classes - 1);
        cb.centers.emplace_back(dim_y, code);
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < num_classes; ++i) {
        for (std::size_t j = i + 1; j < num_classes; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim_y; ++k) {
                const double d = cb.centers[i][k] - cb.centers[j][k];
                d2 += d * d;
            }
            min_dist = std::min(min_dist, std::sqrt(d2));
        }
    }
    cb.min_center_distance = min_dist;
    cb.ambiguous = !(beta < 0.5 * min_dist);
    return cb;
}

double default_beta(std::size_t num_classes) {
    if (num_classes < 2) throw std::invalid_argument("default_beta: need at least 2 classes");
    if (num_classes == 2) return 0.5;
    return 0.4 * 2.0 / static_cast<double>(num_classes - 1);
}

std::vector<double> dequantize(const ClassCodebook& codebook, std::size_t class_idx,
                               SeededRng& rng) {
    if (class_idx >= codebook.num_classes) {
        throw std::invalid_argument("dequantize: class index " + std::to_string(class_idx) +
                                    " out of range");
    }
    std::vector<double> y = codebook.centers[class_idx];
    for (double& v : y) v += rng.uniform(-codebook.beta, codebook.beta);
    return y;
}

std::size_t decode(const ClassCodebook& codebook, const std::vector<double>& y_pred) {
    if (y_pred.size() != codebook.dim_y) {
        throw std::invalid_argument("decode: prediction dimension mismatch");
    }
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < codebook.num_classes; ++i) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < codebook.dim_y; ++k) {
            const double d = y_pred[k] - codebook.centers[i][k];
            d2 += d * d;
        }
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

std::size_t decode_ensemble(const ClassCodebook& codebook,
                            const std::vector<std::vector<double>>& y_preds) {
    if (y_preds.empty()) throw std::invalid_argument("decode_ensemble: empty prediction list");
    std::vector<double> mean(codebook.dim_y, 0.0);
    for (const auto& y : y_preds) {
        if (y.size() != codebook.dim_y) {
            throw std::invalid_argument("decode_ensemble: prediction dimension mismatch");
        }
        for (std::size_t k = 0; k < codebook.dim_y; ++k) mean[k] += y[k];
    }
    for (double& v : mean) v /= static_cast<double>(y_preds.size());
    return decode(codebook, mean);
}

}  // namespace biflow
