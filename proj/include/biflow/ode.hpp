#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "biflow/codec.hpp"
#include "biflow/flow.hpp"
#include "biflow/rng.hpp"

namespace biflow {

enum class Scheme { Euler, Midpoint, Rk4 };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct SolverConfig {
    Scheme scheme = Scheme::Euler;
    std::size_t steps = 20;
    // When integrating backward for classification, keep the x block fixed at
    // the observation instead of co-integrating it.
    bool freeze_x = false;
};

struct Trajectory {
    std::vector<CoupledState> states;  // steps + 1 entries, including both endpoints
};

// Integrates the coupled state along the learned field from t = t0 to t = t1
// on a uniform grid. t0 and t1 must both lie in [0,1]; t1 < t0 integrates
// backward. Throws if any state coordinate becomes non-finite, naming the step.
Trajectory integrate(const VelocityModel& model, const CoupledState& start, double t1,
                     const SolverConfig& config);

// Draws x ~ N(0,I) and a dequantized code for `label`, then runs the flow
// forward to t = 1. Returns the generated x block.
std::vector<double> generate_one(const VelocityModel& model, const ClassCodebook& codebook,
                                 std::size_t label, const SolverConfig& config, SeededRng& rng);

std::vector<std::vector<double>> generate(const VelocityModel& model,
                                          const ClassCodebook& codebook, std::size_t label,
                                          std::size_t count, const SolverConfig& config,
                                          SeededRng& rng);

struct Classification {
    std::size_t label = 0;
    std::vector<double> y0;  // recovered code (mean over ensemble draws)
};

// Classifies a point by integrating backward from t = 1 with y seeded from
// N(0,I), then decoding the recovered code. `ensemble` > 1 averages the
// recovered codes over independent terminal draws before decoding.
Classification classify(const VelocityModel& model, const ClassCodebook& codebook,
                        const std::vector<double>& x, const SolverConfig& config, SeededRng& rng,
                        std::size_t ensemble = 1);

std::string trajectory_to_csv(const Trajectory& trajectory);

}  // namespace biflow
