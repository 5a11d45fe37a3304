#include "biflow/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "biflow/io.hpp"

namespace biflow {

namespace {

double silu(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return x * s;
}

// d/dx [x * sigmoid(x)] = s * (1 + x * (1 - s))
double silu_grad(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

double activate(Activation a, double x) {
    switch (a) {
        case Activation::Silu: return silu(x);
        case Activation::Tanh: return std::tanh(x);
        case Activation::Relu: return x > 0.0 ? x : 0.0;
    }
    return x;
}

double activate_grad(Activation a, double x) {
    switch (a) {
        case Activation::Silu: return silu_grad(x);
        case Activation::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Silu: return "silu";
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
    }
    return "silu";
}

Activation activation_from_name(const std::string& name) {
    if (name == "silu") return Activation::Silu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    throw std::invalid_argument("unknown activation '" + name + "' (expected silu, tanh or relu)");
}

std::size_t ParamTensors::count() const {
    std::size_t n = 0;
    for (const Matrix& w : weights) n += w.data.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

bool ParamTensors::same_shape(const ParamTensors& other) const {
    if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!weights[k].same_shape(other.weights[k])) return false;
        if (biases[k].size() != other.biases[k].size()) return false;
    }
    return true;
}

bool ParamTensors::all_finite() const {
    for (const Matrix& w : weights) {
        if (!w.all_finite()) return false;
    }
    for (const auto& b : biases) {
        for (double x : b) {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

void ParamTensors::fill(double value) {
    for (Matrix& w : weights) std::fill(w.data.begin(), w.data.end(), value);
    for (auto& b : biases) std::fill(b.begin(), b.end(), value);
}

MlpParams mlp_init(const std::vector<std::size_t>& widths, Activation activation, SeededRng& rng) {
    if (widths.size() < 2) throw std::invalid_argument("mlp_init: need at least input and output widths");
    for (std::size_t w : widths) {
        if (w == 0) throw std::invalid_argument("mlp_init: zero-width layer");
    }
    MlpParams params;
    params.widths = widths;
    params.activation = activation;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        const std::size_t fan_in = widths[k];
        const std::size_t fan_out = widths[k + 1];
        Matrix w(fan_out, fan_in);
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (double& x : w.data) x = scale * rng.normal();
        params.tensors.weights.push_back(std::move(w));
        params.tensors.biases.emplace_back(fan_out, 0.0);
    }
    return params;
}

Matrix mlp_forward(const MlpParams& params, const Matrix& input, ForwardCache* cache) {
    if (input.cols != params.input_width()) {
        throw std::invalid_argument("mlp_forward: input width " + std::to_string(input.cols) +
                                    " does not match network input width " +
                                    std::to_string(params.input_width()));
    }
    if (cache) {
        cache->layer_inputs.clear();
        cache->pre_acts.clear();
    }
    const std::size_t num_layers = params.num_layers();
    Matrix act = input;
    for (std::size_t k = 0; k < num_layers; ++k) {
        if (cache) cache->layer_inputs.push_back(act);
        Matrix z = matmul_nt(act, params.tensors.weights[k]);
        const auto& bias = params.tensors.biases[k];
        for (std::size_t i = 0; i < z.rows; ++i) {
            double* zi = z.row(i);
            for (std::size_t j = 0; j < z.cols; ++j) zi[j] += bias[j];
        }
        if (cache) cache->pre_acts.push_back(z);
        if (k + 1 < num_layers) {
            for (double& x : z.data) x = activate(params.activation, x);
        }
        act = std::move(z);
    }
    return act;
}

BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            const Matrix& output_grad) {
    const std::size_t num_layers = params.num_layers();
    if (cache.layer_inputs.size() != num_layers || cache.pre_acts.size() != num_layers) {
        throw std::invalid_argument("mlp_backward: cache does not match network depth");
    }
    if (output_grad.rows != cache.pre_acts.back().rows ||
        output_grad.cols != params.output_width()) {
        throw std::invalid_argument("mlp_backward: output_grad shape mismatch");
    }

    BackwardResult result;
    result.grads.weights.resize(num_layers);
    result.grads.biases.resize(num_layers);

    Matrix dz = output_grad;  // output layer is linear
    for (std::size_t k = num_layers; k-- > 0;) {
        const Matrix& layer_in = cache.layer_inputs[k];
        if (layer_in.rows != dz.rows) throw std::invalid_argument("mlp_backward: stale cache");

        result.grads.weights[k] = matmul_tn(dz, layer_in);
        std::vector<double> db(dz.cols, 0.0);
        for (std::size_t i = 0; i < dz.rows; ++i) {
            const double* dzi = dz.row(i);
            for (std::size_t j = 0; j < dz.cols; ++j) db[j] += dzi[j];
        }
        result.grads.biases[k] = std::move(db);

        Matrix da = matmul_nn(dz, params.tensors.weights[k]);
        if (k > 0) {
            const Matrix& z_prev = cache.pre_acts[k - 1];
            for (std::size_t i = 0; i < da.data.size(); ++i) {
                da.data[i] *= activate_grad(params.activation, z_prev.data[i]);
            }
        }
        dz = std::move(da);
    }
    result.input_grad = std::move(dz);
    return result;
}

ParamTensors finite_diff_grad(const std::function<double(const MlpParams&)>& loss_fn,
                              const MlpParams& params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be positive");
    ParamTensors grads;
    MlpParams probe = params;
    for (std::size_t k = 0; k < params.tensors.weights.size(); ++k) {
        Matrix g = Matrix::zeros_like(params.tensors.weights[k]);
        for (std::size_t i = 0; i < g.data.size(); ++i) {
            const double saved = probe.tensors.weights[k].data[i];
            probe.tensors.weights[k].data[i] = saved + h;
            const double up = loss_fn(probe);
            probe.tensors.weights[k].data[i] = saved - h;
            const double down = loss_fn(probe);
            probe.tensors.weights[k].data[i] = saved;
            g.data[i] = (up - down) / (2.0 * h);
        }
        grads.weights.push_back(std::move(g));
    }
    for (std::size_t k = 0; k < params.tensors.biases.size(); ++k) {
        std::vector<double> g(params.tensors.biases[k].size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double saved = probe.tensors.biases[k][i];
            probe.tensors.biases[k][i] = saved + h;
            const double up = loss_fn(probe);
            probe.tensors.biases[k][i] = saved - h;
            const double down = loss_fn(probe);
            probe.tensors.biases[k][i] = saved;
            g[i] = (up - down) / (2.0 * h);
        }
        grads.biases.push_back(std::move(g));
    }
    return grads;
}

GradComparison compare_grads(const ParamTensors& analytic, const ParamTensors& reference) {
    if (!analytic.same_shape(reference)) {
        throw std::invalid_argument("compare_grads: shape mismatch");
    }
    GradComparison cmp;
    cmp.per_layer_max.assign(analytic.weights.size(), 0.0);
    auto rel = [](double a, double b) {
        const double denom = std::max({std::fabs(a), std::fabs(b), 1e-8});
        return std::fabs(a - b) / denom;
    };
    for (std::size_t k = 0; k < analytic.weights.size(); ++k) {
        const Matrix& aw = analytic.weights[k];
        for (std::size_t i = 0; i < aw.rows; ++i) {
            for (std::size_t j = 0; j < aw.cols; ++j) {
                const double e = rel(aw(i, j), reference.weights[k](i, j));
                cmp.per_layer_max[k] = std::max(cmp.per_layer_max[k], e);
                if (e > cmp.max_rel_error) {
                    cmp.max_rel_error = e;
                    cmp.worst_location = "weight " + std::to_string(k) + " (" + std::to_string(i) +
                                         "," + std::to_string(j) + ")";
                }
            }
        }
        for (std::size_t i = 0; i < analytic.biases[k].size(); ++i) {
            const double e = rel(analytic.biases[k][i], reference.biases[k][i]);
            cmp.per_layer_max[k] = std::max(cmp.per_layer_max[k], e);
            if (e > cmp.max_rel_error) {
                cmp.max_rel_error = e;
                cmp.worst_location = "bias " + std::to_string(k) + " (" + std::to_string(i) + ")";
            }
        }
    }
    return cmp;
}

AdamState adam_init(const MlpParams& params, const AdamConfig& config) {
    AdamState state;
    state.config = config;
    for (const Matrix& w : params.tensors.weights) {
        state.m.weights.push_back(Matrix::zeros_like(w));
        state.v.weights.push_back(Matrix::zeros_like(w));
    }
    for (const auto& b : params.tensors.biases) {
        state.m.biases.emplace_back(b.size(), 0.0);
        state.v.biases.emplace_back(b.size(), 0.0);
    }
    return state;
}

namespace {

void adam_update_span(const double* g, double* m, double* v, double* p, std::size_t n,
                      const AdamConfig& c, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
}

}  // namespace

std::pair<MlpParams, AdamState> adam_step(const MlpParams& params, const ParamTensors& grads,
                                          const AdamState& state) {
    if (!grads.same_shape(state.m)) throw std::invalid_argument("adam_step: shape mismatch");
    MlpParams next_params = params;
    AdamState next_state = state;
    next_state.step = state.step + 1;
    const AdamConfig& c = state.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(next_state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(next_state.step));
    for (std::size_t k = 0; k < grads.weights.size(); ++k) {
        adam_update_span(grads.weights[k].data.data(), next_state.m.weights[k].data.data(),
                         next_state.v.weights[k].data.data(),
                         next_params.tensors.weights[k].data.data(), grads.weights[k].data.size(),
                         c, bc1, bc2);
        adam_update_span(grads.biases[k].data(), next_state.m.biases[k].data(),
                         next_state.v.biases[k].data(), next_params.tensors.biases[k].data(),
                         grads.biases[k].size(), c, bc1, bc2);
    }
    return {std::move(next_params), std::move(next_state)};
}

namespace {

constexpr const char* kCheckpointMagic = "biflow-checkpoint";
constexpr int kCheckpointVersion = 1;

void append_values(std::string& out, const double* values, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out += fmt_double(values[i]);
        out += (i + 1 == n) ? '\n' : ' ';
    }
    if (n == 0) out += '\n';
}

}  // namespace

std::string checkpoint_to_string(const MlpParams& params) {
    std::string out;
    out += kCheckpointMagic;
    out += ' ';
    out += std::to_string(kCheckpointVersion);
    out += '\n';
    out += "activation " + activation_name(params.activation) + "\n";
    out += "widths";
    for (std::size_t w : params.widths) out += ' ' + std::to_string(w);
    out += '\n';
    for (std::size_t k = 0; k < params.num_layers(); ++k) {
        const Matrix& w = params.tensors.weights[k];
        out += "weight " + std::to_string(k) + ' ' + std::to_string(w.rows) + ' ' +
               std::to_string(w.cols) + '\n';
        for (std::size_t i = 0; i < w.rows; ++i) append_values(out, w.row(i), w.cols);
        const auto& b = params.tensors.biases[k];
        out += "bias " + std::to_string(k) + ' ' + std::to_string(b.size()) + '\n';
        append_values(out, b.data(), b.size());
    }
    out += "end\n";
    return out;
}

MlpParams checkpoint_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    int version = 0;
    if (!(in >> word) || word != kCheckpointMagic || !(in >> version)) {
        throw std::runtime_error("checkpoint: missing header");
    }
    if (version != kCheckpointVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }
    MlpParams params;
    std::string act_name;
    if (!(in >> word) || word != "activation" || !(in >> act_name)) {
        throw std::runtime_error("checkpoint: missing activation");
    }
    params.activation = activation_from_name(act_name);
    if (!(in >> word) || word != "widths") throw std::runtime_error("checkpoint: missing widths");
    {
        std::string rest;
        std::getline(in, rest);
        std::istringstream ws(rest);
        std::size_t w;
        while (ws >> w) params.widths.push_back(w);
    }
    if (params.widths.size() < 2) throw std::runtime_error("checkpoint: bad widths line");

    auto read_values = [&in](double* dst, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!(in >> dst[i])) throw std::runtime_error("checkpoint: truncated tensor data");
        }
    };
    for (std::size_t k = 0; k + 1 < params.widths.size(); ++k) {
        std::size_t idx = 0, rows = 0, cols = 0, len = 0;
        if (!(in >> word) || word != "weight" || !(in >> idx >> rows >> cols) || idx != k) {
            throw std::runtime_error("checkpoint: malformed weight header for layer " +
                                     std::to_string(k));
        }
        if (rows != params.widths[k + 1] || cols != params.widths[k]) {
            throw std::runtime_error("checkpoint: weight shape disagrees with widths");
        }
        Matrix w(rows, cols);
        read_values(w.data.data(), w.data.size());
        params.tensors.weights.push_back(std::move(w));
        if (!(in >> word) || word != "bias" || !(in >> idx >> len) || idx != k || len != rows) {
            throw std::runtime_error("checkpoint: malformed bias header for layer " +
                                     std::to_string(k));
        }
        std::vector<double> b(len, 0.0);
        read_values(b.data(), b.size());
        params.tensors.biases.push_back(std::move(b));
    }
    if (!(in >> word) || word != "end") throw std::runtime_error("checkpoint: missing end marker");
    return params;
}

void save_checkpoint(const std::string& path, const MlpParams& params) {
    atomic_write(path, checkpoint_to_string(params));
}

MlpParams load_checkpoint(const std::string& path) {
    return checkpoint_from_string(read_file(path));
}

}  // namespace biflow
