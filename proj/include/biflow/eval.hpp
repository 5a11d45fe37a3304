#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "biflow/codec.hpp"
#include "biflow/datasets.hpp"
#include "biflow/flow.hpp"
#include "biflow/ode.hpp"
#include "biflow/rng.hpp"

namespace biflow {

double accuracy(const std::vector<std::size_t>& predictions,
                const std::vector<std::size_t>& labels);

// Fraction of points whose backward-integrated code decodes to the true label.
double accuracy(const VelocityModel& model, const ClassCodebook& codebook, const Dataset& dataset,
                const SolverConfig& config, SeededRng& rng, std::size_t ensemble = 1);

struct SweepResult {
    std::vector<std::size_t> steps;
    std::vector<double> accuracy;
};

// Runs the backward classifier at each step count, one fresh rng stream per
// step count derived from `seed` so step counts do not perturb each other.
SweepResult sweep_steps(const VelocityModel& model, const ClassCodebook& codebook,
                        const Dataset& dataset, const std::vector<std::size_t>& step_counts,
                        Scheme scheme, std::uint64_t seed, std::size_t ensemble = 1,
                        bool freeze_x = false);

std::string sweep_to_csv(const SweepResult& sweep);

// Unbiased squared maximum mean discrepancy with an RBF kernel
// exp(-||a-b||^2 / (2 bandwidth^2)). Diagonal terms are excluded from the
// within-set sums. Needs at least 2 points per set.
double mmd_rbf(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
               double bandwidth);

// Same, with the bandwidth defaulted to the median heuristic over both sets
// pooled.
double mmd_rbf(const std::vector<std::vector<double>>& a,
               const std::vector<std::vector<double>>& b);

// Biased (V-statistic) variant, kept for closed-form checks.
double mmd_rbf_biased(const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b, double bandwidth);

// Median pairwise Euclidean distance over the pooled points.
double median_heuristic_bandwidth(const std::vector<std::vector<double>>& points);

struct MmdReport {
    std::vector<std::string> pair_names;
    std::vector<double> mmd2;
    double bandwidth = 0.0;
};

std::string mmd_report_to_csv(const MmdReport& report);

// Softmax of negative errors, numerically stabilized. Sums to 1.
std::vector<double> posterior_from_errors(const std::vector<double>& errors);

struct BayesResult {
    std::size_t label = 0;
    std::vector<double> posterior;  // one entry per class
};

// Scores each candidate class by how well the learned label velocity matches
// the analytic one when the path is built from that class code, Monte Carlo
// averaged over n_mc draws of (t, noise). The same draws are reused for every
// class so the comparison is paired.
BayesResult bayes_classify(const VelocityModel& model, const ClassCodebook& codebook,
                           const std::vector<double>& x, std::size_t n_mc, SeededRng& rng);

}  // namespace biflow
