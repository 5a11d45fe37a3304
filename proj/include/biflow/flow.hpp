#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biflow/codec.hpp"
#include "biflow/datasets.hpp"
#include "biflow/nn.hpp"

namespace biflow {

/// A data point paired with its continuous (dequantized) label code.
struct CoupledSample {
    std::vector<double> x;  // data-space coordinates
    std::vector<double> y;  // label-space code
};

/// Joint point on the flow: x_t, y_t and the time they belong to.
struct CoupledState {
    std::vector<double> x;
    std::vector<double> y;
    double t = 0.0;
};

struct CoupledVelocity {
    std::vector<double> vx;
    std::vector<double> vy;
};

enum class TimeEncoding { Raw, Sinusoidal };

std::string time_encoding_name(TimeEncoding enc);
TimeEncoding time_encoding_from_name(const std::string& name);
std::size_t time_feature_width(TimeEncoding enc);
void append_time_features(TimeEncoding enc, double t, std::vector<double>& out);

/// The trained object: a network plus the layout facts needed to feed it.
/// Input is [x_t, y_t, time features]; output splits positionally into
/// (v_x, v_y).
struct VelocityModel {
    MlpParams params;
    std::size_t dim_x = 0;
    std::size_t dim_y = 0;
    TimeEncoding time_encoding = TimeEncoding::Raw;

    std::size_t input_width() const { return dim_x + dim_y + time_feature_width(time_encoding); }
    std::size_t output_width() const { return dim_x + dim_y; }
    void check_widths() const;
};

VelocityModel build_velocity_model(std::size_t dim_x, std::size_t dim_y,
                                   const std::vector<std::size_t>& hidden_widths,
                                   Activation activation, TimeEncoding time_encoding,
                                   std::uint64_t init_seed);

/// Linear path between noise and data: x_t = (1-t) xi_x + t x, and the label
/// path running the opposite way: y_t = (1-t) y + t xi_y.
CoupledState perturb(const CoupledSample& sample, double t, const std::vector<double>& xi_x,
                     const std::vector<double>& xi_y);

/// Constant velocity of the linear path: v_x = x - xi_x, v_y = xi_y - y.
/// The opposing signs are the whole point: x flows noise->data while y flows
/// label->noise.
CoupledVelocity target_velocity(const CoupledSample& sample, const std::vector<double>& xi_x,
                                const std::vector<double>& xi_y);

CoupledVelocity model_velocity(const VelocityModel& model, const CoupledState& state);

/// Per-element randomness for one minibatch: t ~ U(0,1) and standard-normal
/// xi_x, xi_y rows. Kept separate from the loss so gradients can be checked
/// against finite differences with the draws frozen.
struct FlowDraws {
    std::vector<double> t;
    Matrix xi_x;  // batch x dim_x
    Matrix xi_y;  // batch x dim_y
};

FlowDraws draw_flow_noise(std::size_t batch_size, std::size_t dim_x, std::size_t dim_y,
                          SeededRng& rng);

/// Mean over batch and all output coordinates of ||v_theta - v||^2. Fills
/// `grads` (if non-null) with the exact parameter gradient.
double symmetric_loss(const VelocityModel& model, const std::vector<CoupledSample>& batch,
                      const FlowDraws& draws, ParamTensors* grads = nullptr);

/// Standard conditional flow-matching reference: the x path is unchanged,
/// y is pinned to its code for all t, and only the v_x coordinates are
/// penalized. The v_y head sees zero gradient.
double conditional_baseline_loss(const VelocityModel& model,
                                 const std::vector<CoupledSample>& batch, const FlowDraws& draws,
                                 ParamTensors* grads = nullptr);

/// Draw-then-evaluate wrappers over the frozen-draw losses.
double symmetric_loss_and_grad(const VelocityModel& model, const std::vector<CoupledSample>& batch,
                               SeededRng& rng, ParamTensors& grads);
double conditional_baseline_loss_and_grad(const VelocityModel& model,
                                          const std::vector<CoupledSample>& batch, SeededRng& rng,
                                          ParamTensors& grads);

enum class Objective { Symmetric, ConditionalBaseline };

std::string objective_name(Objective o);
Objective objective_from_name(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 1;
    std::size_t batch_size = 128;
    AdamConfig adam;
    Objective objective = Objective::Symmetric;
    bool cosine_lr = false;  // optional cosine annealing of adam.lr over epochs
    std::uint64_t seed = 1;
};

struct TrainResult {
    VelocityModel model;
    std::vector<double> epoch_loss;   // per-epoch mean loss
    std::uint64_t optimizer_steps = 0;
};

/// Minibatch training: seeded shuffle each epoch, labels dequantized fresh
/// per minibatch, fresh (t, xi) per element, one Adam step per minibatch.
TrainResult train(const Dataset& dataset, const ClassCodebook& codebook, VelocityModel model,
                  const TrainConfig& config);

std::string loss_history_to_csv(const std::vector<double>& epoch_loss);

}  // namespace biflow
