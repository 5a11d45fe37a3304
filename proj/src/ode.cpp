#include "biflow/ode.hpp"

#include <cmath>
#include <stdexcept>

#include "biflow/io.hpp"

namespace biflow {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Euler: return "euler";
        case Scheme::Midpoint: return "midpoint";
        case Scheme::Rk4: return "rk4";
    }
    throw std::logic_error("unreachable");
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "euler") return Scheme::Euler;
    if (name == "midpoint") return Scheme::Midpoint;
    if (name == "rk4") return Scheme::Rk4;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected euler, midpoint, or rk4)");
}

namespace {

struct Derivative {
    std::vector<double> dx;
    std::vector<double> dy;
};

Derivative eval_field(const VelocityModel& model, const CoupledState& state, bool freeze_x) {
    const CoupledVelocity v = model_velocity(model, state);
    Derivative d;
    d.dx = freeze_x ? std::vector<double>(state.x.size(), 0.0) : v.vx;
    d.dy = v.vy;
    return d;
}

CoupledState advance(const CoupledState& state, const Derivative& d, double h, double new_t) {
    CoupledState next;
    next.t = new_t;
    next.x.resize(state.x.size());
    next.y.resize(state.y.size());
    for (std::size_t i = 0; i < state.x.size(); ++i) next.x[i] = state.x[i] + h * d.dx[i];
    for (std::size_t i = 0; i < state.y.size(); ++i) next.y[i] = state.y[i] + h * d.dy[i];
    return next;
}

void check_finite(const CoupledState& state, std::size_t step) {
    for (double v : state.x) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("integrate: non-finite x at step " + std::to_string(step));
        }
    }
    for (double v : state.y) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("integrate: non-finite y at step " + std::to_string(step));
        }
    }
}

}  // namespace

Trajectory integrate(const VelocityModel& model, const CoupledState& start, double t1,
                     const SolverConfig& config) {
    if (config.steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
    if (!(start.t >= 0.0 && start.t <= 1.0) || !(t1 >= 0.0 && t1 <= 1.0)) {
        throw std::invalid_argument("integrate: times must lie in [0,1]");
    }
    const double t0 = start.t;
    const std::size_t n = config.steps;

    Trajectory traj;
    traj.states.reserve(n + 1);
    traj.states.push_back(start);
    check_finite(start, 0);

    for (std::size_t k = 0; k < n; ++k) {
        // Grid times are computed from the endpoints, not accumulated.
        const double ta = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
        const double tb = t0 + (t1 - t0) * static_cast<double>(k + 1) / static_cast<double>(n);
        const double h = tb - ta;
        const CoupledState& s = traj.states.back();

        CoupledState next;
        switch (config.scheme) {
            case Scheme::Euler: {
                const Derivative k1 = eval_field(model, s, config.freeze_x);
                next = advance(s, k1, h, tb);
                break;
            }
            case Scheme::Midpoint: {
                const Derivative k1 = eval_field(model, s, config.freeze_x);
                const CoupledState mid = advance(s, k1, 0.5 * h, ta + 0.5 * h);
                const Derivative k2 = eval_field(model, mid, config.freeze_x);
                next = advance(s, k2, h, tb);
                break;
            }
            case Scheme::Rk4: {
                const Derivative k1 = eval_field(model, s, config.freeze_x);
                const CoupledState s2 = advance(s, k1, 0.5 * h, ta + 0.5 * h);
                const Derivative k2 = eval_field(model, s2, config.freeze_x);
                const CoupledState s3 = advance(s, k2, 0.5 * h, ta + 0.5 * h);
                const Derivative k3 = eval_field(model, s3, config.freeze_x);
                const CoupledState s4 = advance(s, k3, h, tb);
                const Derivative k4 = eval_field(model, s4, config.freeze_x);
                Derivative blend;
                blend.dx.resize(k1.dx.size());
                blend.dy.resize(k1.dy.size());
                for (std::size_t i = 0; i < blend.dx.size(); ++i) {
                    blend.dx[i] = (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]) / 6.0;
                }
                for (std::size_t i = 0; i < blend.dy.size(); ++i) {
                    blend.dy[i] = (k1.dy[i] + 2.0 * k2.dy[i] + 2.0 * k3.dy[i] + k4.dy[i]) / 6.0;
                }
                next = advance(s, blend, h, tb);
                break;
            }
        }
        check_finite(next, k + 1);
        traj.states.push_back(std::move(next));
    }
    return traj;
}

std::vector<double> generate_one(const VelocityModel& model, const ClassCodebook& codebook,
                                 std::size_t label, const SolverConfig& config, SeededRng& rng) {
    if (codebook.dim_y != model.dim_y) {
        throw std::invalid_argument("generate: codebook/model dim_y mismatch");
    }
    CoupledState start;
    start.t = 0.0;
    start.x = rng.normal_vector(model.dim_x);
    start.y = dequantize(codebook, label, rng);
    SolverConfig fwd = config;
    fwd.freeze_x = false;
    const Trajectory traj = integrate(model, start, 1.0, fwd);
    return traj.states.back().x;
}

std::vector<std::vector<double>> generate(const VelocityModel& model,
                                          const ClassCodebook& codebook, std::size_t label,
                                          std::size_t count, const SolverConfig& config,
                                          SeededRng& rng) {
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(generate_one(model, codebook, label, config, rng));
    }
    return out;
}

Classification classify(const VelocityModel& model, const ClassCodebook& codebook,
                        const std::vector<double>& x, const SolverConfig& config, SeededRng& rng,
                        std::size_t ensemble) {
    if (ensemble < 1) throw std::invalid_argument("classify: ensemble must be >= 1");
    if (codebook.dim_y != model.dim_y) {
        throw std::invalid_argument("classify: codebook/model dim_y mismatch");
    }
    if (x.size() != model.dim_x) throw std::invalid_argument("classify: point dimension mismatch");

    std::vector<std::vector<double>> codes;
    codes.reserve(ensemble);
    for (std::size_t e = 0; e < ensemble; ++e) {
        CoupledState start;
        start.t = 1.0;
        start.x = x;
        start.y = rng.normal_vector(model.dim_y);
        const Trajectory traj = integrate(model, start, 0.0, config);
        codes.push_back(traj.states.back().y);
    }

    Classification result;
    result.y0.assign(model.dim_y, 0.0);
    for (const auto& c : codes) {
        for (std::size_t j = 0; j < c.size(); ++j) result.y0[j] += c[j];
    }
    for (double& v : result.y0) v /= static_cast<double>(ensemble);
    result.label = decode(codebook, result.y0);
    return result;
}

std::string trajectory_to_csv(const Trajectory& trajectory) {
    if (trajectory.states.empty()) throw std::invalid_argument("trajectory_to_csv: empty");
    const std::size_t dim_x = trajectory.states.front().x.size();
    const std::size_t dim_y = trajectory.states.front().y.size();
    std::string out = "step,t";
    for (std::size_t j = 0; j < dim_x; ++j) out += ",x" + std::to_string(j);
    for (std::size_t j = 0; j < dim_y; ++j) out += ",y" + std::to_string(j);
    out += '\n';
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        const CoupledState& s = trajectory.states[k];
        out += std::to_string(k) + ',' + fmt_double(s.t);
        for (double v : s.x) out += ',' + fmt_double(v);
        for (double v : s.y) out += ',' + fmt_double(v);
        out += '\n';
    }
    return out;
}

}  // namespace biflow
