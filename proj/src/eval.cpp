#include "biflow/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biflow/io.hpp"

namespace biflow {

double accuracy(const std::vector<std::size_t>& predictions,
                const std::vector<std::size_t>& labels) {
    if (predictions.empty()) throw std::invalid_argument("accuracy: empty");
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("accuracy: prediction/label length mismatch");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double accuracy(const VelocityModel& model, const ClassCodebook& codebook, const Dataset& dataset,
                const SolverConfig& config, SeededRng& rng, std::size_t ensemble) {
    if (dataset.size() == 0) throw std::invalid_argument("accuracy: empty dataset");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Classification c =
            classify(model, codebook, dataset.points[i], config, rng, ensemble);
        if (c.label == dataset.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

SweepResult sweep_steps(const VelocityModel& model, const ClassCodebook& codebook,
                        const Dataset& dataset, const std::vector<std::size_t>& step_counts,
                        Scheme scheme, std::uint64_t seed, std::size_t ensemble, bool freeze_x) {
    if (step_counts.empty()) throw std::invalid_argument("sweep_steps: no step counts");
    SweepResult result;
    for (std::size_t steps : step_counts) {
        SolverConfig config;
        config.scheme = scheme;
        config.steps = steps;
        config.freeze_x = freeze_x;
        SeededRng rng(splitmix64(seed ^ splitmix64(steps)));
        result.steps.push_back(steps);
        result.accuracy.push_back(accuracy(model, codebook, dataset, config, rng, ensemble));
    }
    return result;
}

std::string sweep_to_csv(const SweepResult& sweep) {
    std::string out = "steps,accuracy\n";
    for (std::size_t i = 0; i < sweep.steps.size(); ++i) {
        out += std::to_string(sweep.steps[i]) + ',' + fmt_double(sweep.accuracy[i]) + '\n';
    }
    return out;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mmd: point dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double rbf(double sq, double bandwidth) { return std::exp(-sq / (2.0 * bandwidth * bandwidth)); }

// Summation order is fixed by putting the arguments in a canonical order, so
// swapping a and b returns the bit-identical value.
bool point_set_less(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

double mmd_terms(const std::vector<std::vector<double>>& a,
                 const std::vector<std::vector<double>>& b, double bandwidth, bool unbiased) {
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    double kaa = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) kaa += rbf(sq_dist(a[i], a[j]), bandwidth);
    }
    double kbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) kbb += rbf(sq_dist(b[i], b[j]), bandwidth);
    }
    double kab = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) kab += rbf(sq_dist(a[i], b[j]), bandwidth);
    }
    const double dm = static_cast<double>(m);
    const double dn = static_cast<double>(n);
    if (unbiased) {
        return 2.0 * kaa / (dm * (dm - 1.0)) + 2.0 * kbb / (dn * (dn - 1.0)) -
               2.0 * kab / (dm * dn);
    }
    // V-statistic: diagonal kernel values are 1.
    return (2.0 * kaa + dm) / (dm * dm) + (2.0 * kbb + dn) / (dn * dn) - 2.0 * kab / (dm * dn);
}

}  // namespace

double mmd_rbf(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
               double bandwidth) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("mmd_rbf: need >= 2 points per set");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("mmd_rbf: bandwidth must be > 0");
    return point_set_less(b, a) ? mmd_terms(b, a, bandwidth, true)
                                : mmd_terms(a, b, bandwidth, true);
}

double mmd_rbf(const std::vector<std::vector<double>>& a,
               const std::vector<std::vector<double>>& b) {
    std::vector<std::vector<double>> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    return mmd_rbf(a, b, median_heuristic_bandwidth(pooled));
}

double mmd_rbf_biased(const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b, double bandwidth) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mmd_rbf_biased: empty set");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("mmd_rbf_biased: bandwidth must be > 0");
    return point_set_less(b, a) ? mmd_terms(b, a, bandwidth, false)
                                : mmd_terms(a, b, bandwidth, false);
}

double median_heuristic_bandwidth(const std::vector<std::vector<double>>& points) {
    if (points.size() < 2) {
        throw std::invalid_argument("median_heuristic_bandwidth: need >= 2 points");
    }
    std::vector<double> dists;
    dists.reserve(points.size() * (points.size() - 1) / 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            dists.push_back(std::sqrt(sq_dist(points[i], points[j])));
        }
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t n = dists.size();
    const double median =
        n % 2 == 1 ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
    if (!(median > 0.0)) {
        throw std::invalid_argument("median_heuristic_bandwidth: degenerate point set");
    }
    return median;
}

std::string mmd_report_to_csv(const MmdReport& report) {
    std::string out = "pair,mmd2,bandwidth\n";
    for (std::size_t i = 0; i < report.pair_names.size(); ++i) {
        out += report.pair_names[i] + ',' + fmt_double(report.mmd2[i]) + ',' +
               fmt_double(report.bandwidth) + '\n';
    }
    return out;
}

std::vector<double> posterior_from_errors(const std::vector<double>& errors) {
    if (errors.empty()) throw std::invalid_argument("posterior_from_errors: no classes");
    for (double e : errors) {
        if (!std::isfinite(e)) throw std::invalid_argument("posterior_from_errors: non-finite error");
    }
    const double lo = *std::min_element(errors.begin(), errors.end());
    std::vector<double> weights(errors.size());
    double total = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        weights[i] = std::exp(lo - errors[i]);
        total += weights[i];
    }
    for (double& w : weights) w /= total;
    return weights;
}

BayesResult bayes_classify(const VelocityModel& model, const ClassCodebook& codebook,
                           const std::vector<double>& x, std::size_t n_mc, SeededRng& rng) {
    if (n_mc < 1) throw std::invalid_argument("bayes_classify: n_mc must be >= 1");
    if (codebook.dim_y != model.dim_y) {
        throw std::invalid_argument("bayes_classify: codebook/model dim_y mismatch");
    }
    if (x.size() != model.dim_x) {
        throw std::invalid_argument("bayes_classify: point dimension mismatch");
    }

    // One shared set of draws keeps the per-class comparison paired. Stratified
    // times and antithetic noise pairs cut estimator variance; each draw still
    // has the nominal marginals. The error is scored on the label velocity: the
    // data branch contributes the same model-misfit floor under every class
    // hypothesis and only drowns the class signal.
    FlowDraws draws = draw_flow_noise(n_mc, model.dim_x, model.dim_y, rng);
    for (std::size_t k = 0; k < n_mc; ++k) {
        draws.t[k] = (static_cast<double>(k) + draws.t[k]) / static_cast<double>(n_mc);
    }
    for (std::size_t k = 1; k < n_mc; k += 2) {
        for (std::size_t d = 0; d < model.dim_x; ++d) draws.xi_x(k, d) = -draws.xi_x(k - 1, d);
        for (std::size_t d = 0; d < model.dim_y; ++d) draws.xi_y(k, d) = -draws.xi_y(k - 1, d);
    }

    std::vector<double> errors(codebook.num_classes, 0.0);
    const double denom = static_cast<double>(n_mc) * static_cast<double>(model.dim_y);
    for (std::size_t j = 0; j < codebook.num_classes; ++j) {
        CoupledSample sample;
        sample.x = x;
        sample.y = codebook.centers[j];
        double err = 0.0;
        for (std::size_t k = 0; k < n_mc; ++k) {
            std::vector<double> xi_x(draws.xi_x.row(k), draws.xi_x.row(k) + model.dim_x);
            std::vector<double> xi_y(draws.xi_y.row(k), draws.xi_y.row(k) + model.dim_y);
            const CoupledState state = perturb(sample, draws.t[k], xi_x, xi_y);
            const CoupledVelocity pred = model_velocity(model, state);
            const CoupledVelocity tgt = target_velocity(sample, xi_x, xi_y);
            for (std::size_t d = 0; d < model.dim_y; ++d) {
                const double r = pred.vy[d] - tgt.vy[d];
                err += r * r;
            }
        }
        errors[j] = err / denom;
    }

    BayesResult result;
    result.posterior = posterior_from_errors(errors);
    std::size_t best = 0;
    for (std::size_t j = 1; j < errors.size(); ++j) {
        if (errors[j] < errors[best]) best = j;
    }
    result.label = best;
    return result;
}

}  // namespace biflow
