#include "biflow/flow.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "biflow/io.hpp"

namespace biflow {

std::string time_encoding_name(TimeEncoding enc) {
    return enc == TimeEncoding::Raw ? "raw" : "sinusoidal";
}

TimeEncoding time_encoding_from_name(const std::string& name) {
    if (name == "raw") return TimeEncoding::Raw;
    if (name == "sinusoidal") return TimeEncoding::Sinusoidal;
    throw std::invalid_argument("unknown time encoding '" + name +
                                "' (expected raw or sinusoidal)");
}

std::size_t time_feature_width(TimeEncoding enc) {
    return enc == TimeEncoding::Raw ? 1 : 8;
}

void append_time_features(TimeEncoding enc, double t, std::vector<double>& out) {
    if (enc == TimeEncoding::Raw) {
        out.push_back(t);
        return;
    }
    // four sin/cos pairs at frequencies 1, 2, 4, 8 cycles over [0,1]
    for (int k = 0; k < 4; ++k) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(1 << k) * t;
        out.push_back(std::sin(w));
        out.push_back(std::cos(w));
    }
}

void VelocityModel::check_widths() const {
    if (params.input_width() != input_width() || params.output_width() != output_width()) {
        throw std::invalid_argument(
            "velocity model: network widths (" + std::to_string(params.input_width()) + " -> " +
            std::to_string(params.output_width()) + ") do not match dim_x=" +
            std::to_string(dim_x) + ", dim_y=" + std::to_string(dim_y) + " with " +
            time_encoding_name(time_encoding) + " time encoding");
    }
}

VelocityModel build_velocity_model(std::size_t dim_x, std::size_t dim_y,
                                   const std::vector<std::size_t>& hidden_widths,
                                   Activation activation, TimeEncoding time_encoding,
                                   std::uint64_t init_seed) {
    if (dim_x < 1 || dim_y < 1) {
        throw std::invalid_argument("build_velocity_model: dim_x and dim_y must be >= 1");
    }
    VelocityModel model;
    model.dim_x = dim_x;
    model.dim_y = dim_y;
    model.time_encoding = time_encoding;
    std::vector<std::size_t> widths;
    widths.push_back(model.input_width());
    widths.insert(widths.end(), hidden_widths.begin(), hidden_widths.end());
    widths.push_back(model.output_width());
    SeededRng rng(init_seed);
    model.params = mlp_init(widths, activation, rng);
    return model;
}

namespace {

void check_dims(const CoupledSample& sample, const std::vector<double>& xi_x,
                const std::vector<double>& xi_y) {
    if (sample.x.size() != xi_x.size() || sample.y.size() != xi_y.size()) {
        throw std::invalid_argument("coupled sample / noise dimension mismatch");
    }
}

}  // namespace

CoupledState perturb(const CoupledSample& sample, double t, const std::vector<double>& xi_x,
                     const std::vector<double>& xi_y) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("perturb: t outside [0,1]");
    check_dims(sample, xi_x, xi_y);
    CoupledState state;
    state.t = t;
    state.x.resize(sample.x.size());
    state.y.resize(sample.y.size());
    for (std::size_t i = 0; i < sample.x.size(); ++i) {
        state.x[i] = (1.0 - t) * xi_x[i] + t * sample.x[i];
    }
    for (std::size_t i = 0; i < sample.y.size(); ++i) {
        state.y[i] = (1.0 - t) * sample.y[i] + t * xi_y[i];
    }
    return state;
}

CoupledVelocity target_velocity(const CoupledSample& sample, const std::vector<double>& xi_x,
                                const std::vector<double>& xi_y) {
    check_dims(sample, xi_x, xi_y);
    CoupledVelocity v;
    v.vx.resize(sample.x.size());
    v.vy.resize(sample.y.size());
    for (std::size_t i = 0; i < sample.x.size(); ++i) v.vx[i] = sample.x[i] - xi_x[i];
    for (std::size_t i = 0; i < sample.y.size(); ++i) v.vy[i] = xi_y[i] - sample.y[i];
    return v;
}

CoupledVelocity model_velocity(const VelocityModel& model, const CoupledState& state) {
    model.check_widths();
    if (state.x.size() != model.dim_x || state.y.size() != model.dim_y) {
        throw std::invalid_argument("model_velocity: state dimension mismatch");
    }
    std::vector<double> features;
    features.reserve(model.input_width());
    features.insert(features.end(), state.x.begin(), state.x.end());
    features.insert(features.end(), state.y.begin(), state.y.end());
    append_time_features(model.time_encoding, state.t, features);

    Matrix input(1, features.size());
    input.data = features;
    const Matrix output = mlp_forward(model.params, input);

    CoupledVelocity v;
    v.vx.assign(output.row(0), output.row(0) + model.dim_x);
    v.vy.assign(output.row(0) + model.dim_x, output.row(0) + model.dim_x + model.dim_y);
    return v;
}

FlowDraws draw_flow_noise(std::size_t batch_size, std::size_t dim_x, std::size_t dim_y,
                          SeededRng& rng) {
    FlowDraws draws;
    draws.t.resize(batch_size);
    draws.xi_x = Matrix(batch_size, dim_x);
    draws.xi_y = Matrix(batch_size, dim_y);
    for (std::size_t i = 0; i < batch_size; ++i) {
        draws.t[i] = rng.uniform();
        for (std::size_t j = 0; j < dim_x; ++j) draws.xi_x(i, j) = rng.normal();
        for (std::size_t j = 0; j < dim_y; ++j) draws.xi_y(i, j) = rng.normal();
    }
    return draws;
}

namespace {

// Shared by both objectives. `pin_y` holds y_t at the sample's code for all t
// and drops the y coordinates from the loss.
double coupled_loss(const VelocityModel& model, const std::vector<CoupledSample>& batch,
                    const FlowDraws& draws, bool pin_y, ParamTensors* grads) {
    model.check_widths();
    if (batch.empty()) throw std::invalid_argument("loss: empty batch");
    const std::size_t b = batch.size();
    if (draws.t.size() != b || draws.xi_x.rows != b || draws.xi_y.rows != b) {
        throw std::invalid_argument("loss: draws do not match batch size");
    }
    const std::size_t dim_x = model.dim_x;
    const std::size_t dim_y = model.dim_y;

    Matrix input(b, model.input_width());
    Matrix target(b, dim_x + dim_y);
    std::vector<double> tf;
    for (std::size_t i = 0; i < b; ++i) {
        const CoupledSample& s = batch[i];
        if (s.x.size() != dim_x || s.y.size() != dim_y) {
            throw std::invalid_argument("loss: sample dimension mismatch");
        }
        const double t = draws.t[i];
        double* row = input.row(i);
        for (std::size_t j = 0; j < dim_x; ++j) {
            row[j] = (1.0 - t) * draws.xi_x(i, j) + t * s.x[j];
            target(i, j) = s.x[j] - draws.xi_x(i, j);
        }
        for (std::size_t j = 0; j < dim_y; ++j) {
            row[dim_x + j] = pin_y ? s.y[j] : (1.0 - t) * s.y[j] + t * draws.xi_y(i, j);
            target(i, dim_x + j) = draws.xi_y(i, j) - s.y[j];
        }
        tf.clear();
        append_time_features(model.time_encoding, t, tf);
        for (std::size_t j = 0; j < tf.size(); ++j) row[dim_x + dim_y + j] = tf[j];
    }

    ForwardCache cache;
    const Matrix pred = mlp_forward(model.params, input, grads ? &cache : nullptr);

    const std::size_t loss_dims = pin_y ? dim_x : dim_x + dim_y;
    const double denom = static_cast<double>(b) * static_cast<double>(loss_dims);
    double loss = 0.0;
    Matrix output_grad(b, dim_x + dim_y);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < dim_x + dim_y; ++j) {
            if (pin_y && j >= dim_x) continue;
            const double r = pred(i, j) - target(i, j);
            loss += r * r;
            output_grad(i, j) = 2.0 * r / denom;
        }
    }
    loss /= denom;

    if (grads) {
        BackwardResult back = mlp_backward(model.params, cache, output_grad);
        *grads = std::move(back.grads);
    }
    return loss;
}

}  // namespace

double symmetric_loss(const VelocityModel& model, const std::vector<CoupledSample>& batch,
                      const FlowDraws& draws, ParamTensors* grads) {
    return coupled_loss(model, batch, draws, false, grads);
}

double conditional_baseline_loss(const VelocityModel& model,
                                 const std::vector<CoupledSample>& batch, const FlowDraws& draws,
                                 ParamTensors* grads) {
    return coupled_loss(model, batch, draws, true, grads);
}

double symmetric_loss_and_grad(const VelocityModel& model, const std::vector<CoupledSample>& batch,
                               SeededRng& rng, ParamTensors& grads) {
    const FlowDraws draws = draw_flow_noise(batch.size(), model.dim_x, model.dim_y, rng);
    return symmetric_loss(model, batch, draws, &grads);
}

double conditional_baseline_loss_and_grad(const VelocityModel& model,
                                          const std::vector<CoupledSample>& batch, SeededRng& rng,
                                          ParamTensors& grads) {
    const FlowDraws draws = draw_flow_noise(batch.size(), model.dim_x, model.dim_y, rng);
    return conditional_baseline_loss(model, batch, draws, &grads);
}

std::string objective_name(Objective o) {
    return o == Objective::Symmetric ? "symmetric" : "conditional-baseline";
}

Objective objective_from_name(const std::string& name) {
    if (name == "symmetric") return Objective::Symmetric;
    if (name == "conditional-baseline") return Objective::ConditionalBaseline;
    throw std::invalid_argument("unknown objective '" + name +
                                "' (expected symmetric or conditional-baseline)");
}

TrainResult train(const Dataset& dataset, const ClassCodebook& codebook, VelocityModel model,
                  const TrainConfig& config) {
    if (dataset.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    model.check_widths();
    if (dataset.dim_x != model.dim_x) throw std::invalid_argument("train: dataset dim mismatch");
    for (std::size_t l : dataset.labels) {
        if (l >= codebook.num_classes) {
            throw std::invalid_argument("train: label " + std::to_string(l) +
                                        " outside codebook with " +
                                        std::to_string(codebook.num_classes) + " classes");
        }
    }

    SeededRng rng(config.seed);
    AdamState adam = adam_init(model.params, config.adam);
    TrainResult result;
    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.cosine_lr) {
            const double frac =
                static_cast<double>(epoch - 1) / static_cast<double>(config.epochs);
            adam.config.lr = config.adam.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
        }
        rng.shuffle(order);
        double epoch_sum = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t end = std::min(n, start + config.batch_size);
            std::vector<CoupledSample> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t idx = order[i];
                batch.push_back(
                    {dataset.points[idx], dequantize(codebook, dataset.labels[idx], rng)});
            }
            const FlowDraws draws = draw_flow_noise(batch.size(), model.dim_x, model.dim_y, rng);
            ParamTensors grads;
            const double loss = config.objective == Objective::Symmetric
                                    ? symmetric_loss(model, batch, draws, &grads)
                                    : conditional_baseline_loss(model, batch, draws, &grads);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch));
            }
            auto [next_params, next_adam] = adam_step(model.params, grads, adam);
            model.params = std::move(next_params);
            adam = std::move(next_adam);
            ++result.optimizer_steps;
            epoch_sum += loss * static_cast<double>(end - start);
        }
        result.epoch_loss.push_back(epoch_sum / static_cast<double>(n));
    }
    result.model = std::move(model);
    return result;
}

std::string loss_history_to_csv(const std::vector<double>& epoch_loss) {
    std::string out = "epoch,mean_loss\n";
    for (std::size_t i = 0; i < epoch_loss.size(); ++i) {
        out += std::to_string(i + 1) + ',' + fmt_double(epoch_loss[i]) + '\n';
    }
    return out;
}

}  // namespace biflow
