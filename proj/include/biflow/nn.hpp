#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "biflow/matrix.hpp"
#include "biflow/rng.hpp"

namespace biflow {

enum class Activation { Silu, Tanh, Relu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Weight/bias tensors in MLP layout. Shared by parameters, gradients and
/// optimizer moments so shapes always mirror each other.
struct ParamTensors {
    std::vector<Matrix> weights;               // weights[k]: widths[k+1] x widths[k]
    std::vector<std::vector<double>> biases;   // biases[k]: widths[k+1]

    std::size_t count() const;
    bool same_shape(const ParamTensors& other) const;
    bool all_finite() const;
    void fill(double value);
};

/// Fully connected network: hidden layers use `activation`, the output layer
/// is linear.
struct MlpParams {
    std::vector<std::size_t> widths;  // input width first, output width last
    ParamTensors tensors;
    Activation activation = Activation::Silu;

    std::size_t num_layers() const { return tensors.weights.size(); }
    std::size_t input_width() const { return widths.front(); }
    std::size_t output_width() const { return widths.back(); }
    std::size_t param_count() const { return tensors.count(); }
};

/// Gaussian init scaled by sqrt(2 / fan_in); biases zero.
MlpParams mlp_init(const std::vector<std::size_t>& widths, Activation activation, SeededRng& rng);

/// Pre-activations and layer inputs kept from a forward pass for the
/// matching backward pass.
struct ForwardCache {
    std::vector<Matrix> layer_inputs;  // layer_inputs[k]: input to layer k (batch x widths[k])
    std::vector<Matrix> pre_acts;      // pre_acts[k]: z_k (batch x widths[k+1])
};

Matrix mlp_forward(const MlpParams& params, const Matrix& input, ForwardCache* cache = nullptr);

struct BackwardResult {
    ParamTensors grads;
    Matrix input_grad;
};

/// Exact reverse-mode gradients of the scalar whose output-sensitivity is
/// `output_grad`, w.r.t. every parameter and the input batch.
BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            const Matrix& output_grad);

/// Central finite differences (L(p+h) - L(p-h)) / (2h), coordinate by
/// coordinate. Verification oracle; O(param_count) loss evaluations.
ParamTensors finite_diff_grad(const std::function<double(const MlpParams&)>& loss_fn,
                              const MlpParams& params, double h);

/// Max relative error between two gradient sets, with the location of the
/// worst coordinate ("weight k (i,j)" / "bias k (i)").
struct GradComparison {
    double max_rel_error = 0.0;
    std::string worst_location;
    std::vector<double> per_layer_max;  // one entry per layer
};
GradComparison compare_grads(const ParamTensors& analytic, const ParamTensors& reference);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    ParamTensors m;  // first moments
    ParamTensors v;  // second moments
    std::uint64_t step = 0;
    AdamConfig config;
};

AdamState adam_init(const MlpParams& params, const AdamConfig& config);

/// One bias-corrected Adam update; returns fresh values, inputs untouched.
std::pair<MlpParams, AdamState> adam_step(const MlpParams& params, const ParamTensors& grads,
                                          const AdamState& state);

/// Text checkpoint: version line, widths, activation, then every tensor as
/// decimal floats with 17 significant digits. Round-trips bit-identically.
std::string checkpoint_to_string(const MlpParams& params);
MlpParams checkpoint_from_string(const std::string& text);
void save_checkpoint(const std::string& path, const MlpParams& params);
MlpParams load_checkpoint(const std::string& path);

}  // namespace biflow
