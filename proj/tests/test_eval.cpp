#include <cmath>
#include <stdexcept>
#include <cstddef>
#include <vector>

#include "biflow/codec.hpp"
#include "biflow/datasets.hpp"
#include "biflow/eval.hpp"
#include "biflow/flow.hpp"
#include "biflow/nn.hpp"
#include "biflow/rng.hpp"
#include "doctest.h"

using namespace biflow;

namespace {

std::vector<std::vector<double>> gaussian_cloud(std::size_t n, double cx, double cy,
                                                std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<std::vector<double>> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back({cx + rng.normal(), cy + rng.normal()});
    return pts;
}

VelocityModel tiny_zero_model() {
    VelocityModel m;
    m.dim_x = 2;
    m.dim_y = 1;
    SeededRng init(1);
    m.params = mlp_init({4, 3}, Activation::Silu, init);
    m.params.tensors.fill(0.0);
    return m;
}

}  // namespace

TEST_CASE("prediction-list accuracy") {
    CHECK(accuracy({0, 1, 1}, {0, 1, 1}) == 1.0);
    CHECK(accuracy({1, 0, 0}, {0, 1, 1}) == 0.0);
    CHECK(accuracy({0, 0}, {0, 1}) == 0.5);
    CHECK_THROWS(accuracy({0}, {0, 1}));
    CHECK_THROWS(accuracy({}, {}));
}

TEST_CASE("posterior from errors is a stabilized softmax") {
    const auto uniform = posterior_from_errors({3.0, 3.0});
    CHECK(uniform[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(uniform[1] == doctest::Approx(0.5).epsilon(1e-15));

    const auto sharp = posterior_from_errors({0.0, 100.0});
    CHECK(sharp[0] >= 1.0 - 1e-15);
    CHECK(sharp[0] + sharp[1] == doctest::Approx(1.0).epsilon(1e-15));

    // huge raw errors must not overflow to nan
    const auto huge = posterior_from_errors({1e300, 1e300 + 1e284, 2e300});
    double sum = 0.0;
    for (double p : huge) {
        CHECK(std::isfinite(p));
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    CHECK_THROWS(posterior_from_errors({}));
}

TEST_CASE("biased mmd on singletons has a closed form") {
    const std::vector<std::vector<double>> a = {{0.0, 0.0}};
    for (double d : {0.5, 1.0, 2.0}) {
        const std::vector<std::vector<double>> b = {{d, 0.0}};
        for (double h : {0.7, 1.0, 3.0}) {
            const double expect = 2.0 * (1.0 - std::exp(-d * d / (2.0 * h * h)));
            CHECK(mmd_rbf_biased(a, b, h) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("identical multisets have zero biased mmd") {
    const auto pts = gaussian_cloud(64, 0.0, 0.0, 9);
    CHECK(std::abs(mmd_rbf_biased(pts, pts, 1.0)) <= 1e-12);
    // the unbiased estimator drops the diagonal only in the within-set terms,
    // so it need not vanish on identical multisets
    CHECK(std::isfinite(mmd_rbf(pts, pts, 1.0)));
}

TEST_CASE("mmd is exactly symmetric in its arguments") {
    const auto a = gaussian_cloud(40, 0.0, 0.0, 1);
    const auto b = gaussian_cloud(50, 0.4, -0.2, 2);
    CHECK(mmd_rbf(a, b, 0.9) == mmd_rbf(b, a, 0.9));
    CHECK(mmd_rbf_biased(a, b, 0.9) == mmd_rbf_biased(b, a, 0.9));
}

TEST_CASE("mmd separates shifted clouds from matched ones") {
    const auto base = gaussian_cloud(200, 0.0, 0.0, 3);
    const auto same = gaussian_cloud(200, 0.0, 0.0, 4);
    const auto far = gaussian_cloud(200, 3.0, 0.0, 5);

    std::vector<std::vector<double>> pooled = base;
    pooled.insert(pooled.end(), same.begin(), same.end());
    const double h = median_heuristic_bandwidth(pooled);

    const double near_val = std::abs(mmd_rbf(base, same, h));
    const double far_val = mmd_rbf(base, far, h);
    CHECK(far_val > 10.0 * near_val);
    CHECK(far_val > 0.1);
}

TEST_CASE("unbiased mmd needs two points per side") {
    const std::vector<std::vector<double>> one = {{0.0}};
    const std::vector<std::vector<double>> two = {{0.0}, {1.0}};
    CHECK_THROWS(mmd_rbf(one, two, 1.0));
    CHECK_THROWS(mmd_rbf(two, one, 1.0));
    CHECK_THROWS(mmd_rbf(two, two, 0.0));
    CHECK_THROWS(mmd_rbf(two, two, -1.0));
}

TEST_CASE("median heuristic bandwidth") {
    // pairwise distances 1, 1, 2 -> median 1
    CHECK(median_heuristic_bandwidth({{0.0}, {1.0}, {2.0}}) == 1.0);
    // distances 3, 4, 5 -> median 4
    CHECK(median_heuristic_bandwidth({{0.0, 0.0}, {3.0, 0.0}, {3.0, 4.0}}) == 4.0);
    CHECK_THROWS(median_heuristic_bandwidth({{0.0}, {0.0}}));  // degenerate: zero median
    CHECK_THROWS(median_heuristic_bandwidth({{0.0}}));
}

TEST_CASE("pooled-median overload agrees with the explicit bandwidth") {
    const auto a = gaussian_cloud(30, 0.0, 0.0, 6);
    const auto b = gaussian_cloud(30, 1.0, 0.0, 7);
    std::vector<std::vector<double>> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    CHECK(mmd_rbf(a, b) == mmd_rbf(a, b, median_heuristic_bandwidth(pooled)));
}

TEST_CASE("mmd report csv") {
    MmdReport report;
    report.pair_names = {"gen_vs_real_0", "real_half_0"};
    report.mmd2 = {0.5, 0.25};
    report.bandwidth = 2.0;
    const std::string csv = mmd_report_to_csv(report);
    CHECK(csv == "pair,mmd2,bandwidth\ngen_vs_real_0,0.5,2\nreal_half_0,0.25,2\n");
}

TEST_CASE("dataset accuracy ties out against per-point classification") {
    const VelocityModel m = tiny_zero_model();
    const ClassCodebook cb = build_codebook(2, 1, 0.5);
    SpiralConfig scfg;
    scfg.n_per_class = 25;
    const Dataset ds = two_spirals(scfg);
    SolverConfig cfg;
    cfg.steps = 2;

    SeededRng rng_a(11);
    const double acc = accuracy(m, cb, ds, cfg, rng_a, 2);

    SeededRng rng_b(11);
    std::vector<std::size_t> preds;
    for (const auto& p : ds.points) preds.push_back(classify(m, cb, p, cfg, rng_b, 2).label);
    CHECK(acc == accuracy(preds, ds.labels));
}

TEST_CASE("sweep is deterministic and step-count independent") {
    const VelocityModel m = tiny_zero_model();
    const ClassCodebook cb = build_codebook(2, 1, 0.5);
    SpiralConfig scfg;
    scfg.n_per_class = 20;
    const Dataset ds = two_spirals(scfg);

    const SweepResult a = sweep_steps(m, cb, ds, {1, 2, 5}, Scheme::Euler, 42);
    const SweepResult b = sweep_steps(m, cb, ds, {1, 2, 5}, Scheme::Euler, 42);
    CHECK(a.accuracy == b.accuracy);
    REQUIRE(a.steps == std::vector<std::size_t>{1, 2, 5});

    // each step count draws from its own stream: dropping one leaves the rest
    const SweepResult c = sweep_steps(m, cb, ds, {2, 5}, Scheme::Euler, 42);
    CHECK(c.accuracy[0] == a.accuracy[1]);
    CHECK(c.accuracy[1] == a.accuracy[2]);

    CHECK_THROWS(sweep_steps(m, cb, ds, {}, Scheme::Euler, 42));
}

TEST_CASE("sweep csv format") {
    SweepResult s;
    s.steps = {1, 50};
    s.accuracy = {1.0, 0.82};
    CHECK(sweep_to_csv(s) == "steps,accuracy\n1,1\n50,0.81999999999999995\n");
}

TEST_CASE("bayes posteriors are simplex points and respect the draws contract") {
    const VelocityModel m = tiny_zero_model();
    const ClassCodebook cb = build_codebook(2, 1, 0.5);

    SeededRng rng_a(13);
    const BayesResult a = bayes_classify(m, cb, {0.5, -0.5}, 64, rng_a);
    REQUIRE(a.posterior.size() == 2);
    CHECK(std::abs(a.posterior[0] + a.posterior[1] - 1.0) <= 1e-12);
    CHECK(a.posterior[a.label] >= a.posterior[1 - a.label]);

    SeededRng rng_b(13);
    const BayesResult b = bayes_classify(m, cb, {0.5, -0.5}, 64, rng_b);
    CHECK(a.posterior == b.posterior);
    CHECK(a.label == b.label);

    SeededRng rng_c(13);
    CHECK_THROWS(bayes_classify(m, cb, {0.5, -0.5}, 0, rng_c));
    CHECK_THROWS(bayes_classify(m, cb, {0.5}, 8, rng_c));
}

TEST_CASE("bayes prefers the class whose code explains the label path") {
    // Hand-built field v_y = y_t: under the true class code the label path
    // y_t = (1-t)c + t xi has velocity target xi - c, while the model emits
    // y_t. Errors differ across hypotheses, so the posterior must move off
    // uniform and the argmin must match on a deterministic draw.
    VelocityModel m = tiny_zero_model();
    m.params.tensors.weights[0](2, 2) = 1.0;  // v_y = y_t
    const ClassCodebook cb = build_codebook(2, 1, 0.5);

    SeededRng rng(21);
    const BayesResult r = bayes_classify(m, cb, {0.1, 0.2}, 64, rng);
    CHECK(r.posterior[r.label] > 0.5);
    CHECK(r.posterior[0] + r.posterior[1] == doctest::Approx(1.0).epsilon(1e-14));
}
