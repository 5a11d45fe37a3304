#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "biflow/codec.hpp"
#include "biflow/datasets.hpp"
#include "biflow/eval.hpp"
#include "biflow/flow.hpp"
#include "biflow/nn.hpp"
#include "biflow/ode.hpp"

namespace py = pybind11;
using namespace biflow;

namespace {

using PointList = std::vector<std::vector<double>>;
using LabelList = std::vector<std::size_t>;

ClassCodebook codebook_for(const VelocityModel& model, std::size_t num_classes, double beta) {
    return build_codebook(num_classes, model.dim_y, beta > 0.0 ? beta : default_beta(num_classes));
}

Dataset dataset_from(const PointList& points, const LabelList& labels, std::size_t num_classes) {
    if (points.empty()) throw std::invalid_argument("no points");
    if (points.size() != labels.size()) throw std::invalid_argument("points/labels length mismatch");
    Dataset ds;
    ds.points = points;
    ds.labels = labels;
    ds.dim_x = points.front().size();
    ds.num_classes = num_classes;
    ds.generator = "external";
    for (const auto& p : points) {
        if (p.size() != ds.dim_x) throw std::invalid_argument("ragged point list");
    }
    return ds;
}

SolverConfig solver_of(const std::string& scheme, std::size_t steps) {
    SolverConfig sc;
    sc.scheme = scheme_from_name(scheme);
    sc.steps = steps;
    return sc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled two-way flow on toy point clouds";

    py::class_<VelocityModel>(m, "Model")
        .def_readonly("dim_x", &VelocityModel::dim_x)
        .def_readonly("dim_y", &VelocityModel::dim_y)
        .def("to_text", [](const VelocityModel& self) { return checkpoint_to_string(self.params); })
        .def("__repr__", [](const VelocityModel& self) {
            return "<biflow.Model dim_x=" + std::to_string(self.dim_x) +
                   " dim_y=" + std::to_string(self.dim_y) + ">";
        });

    m.def(
        "model_from_text",
        [](const std::string& text, std::size_t dim_x, std::size_t dim_y,
           const std::string& time_encoding) {
            VelocityModel model;
            model.params = checkpoint_from_string(text);
            model.dim_x = dim_x;
            model.dim_y = dim_y;
            model.time_encoding = time_encoding_from_name(time_encoding);
            model.check_widths();
            return model;
        },
        py::arg("text"), py::arg("dim_x") = 2, py::arg("dim_y") = 1,
        py::arg("time_encoding") = "raw");

    m.def(
        "two_spirals",
        [](std::size_t n_per_class, double noise_sigma, std::uint64_t seed) {
            SpiralConfig sc;
            sc.n_per_class = n_per_class;
            sc.noise_sigma = noise_sigma;
            sc.seed = seed;
            const Dataset ds = two_spirals(sc);
            return std::make_pair(ds.points, ds.labels);
        },
        py::arg("n_per_class") = 1000, py::arg("noise_sigma") = 0.02, py::arg("seed") = 7);

    m.def(
        "train",
        [](const PointList& points, const LabelList& labels, std::size_t num_classes,
           std::size_t epochs, std::size_t batch_size, double lr,
           const std::vector<std::size_t>& hidden, const std::string& activation,
           const std::string& objective, std::uint64_t seed, std::size_t dim_y, double beta,
           std::uint64_t init_seed) {
            const Dataset ds = dataset_from(points, labels, num_classes);
            VelocityModel model =
                build_velocity_model(ds.dim_x, dim_y, hidden, activation_from_name(activation),
                                     TimeEncoding::Raw, init_seed);
            const ClassCodebook cb = codebook_for(model, num_classes, beta);
            TrainConfig tc;
            tc.epochs = epochs;
            tc.batch_size = batch_size;
            tc.adam.lr = lr;
            tc.objective = objective_from_name(objective);
            tc.seed = seed;
            TrainResult result = train(ds, cb, std::move(model), tc);
            return std::make_pair(std::move(result.model), result.epoch_loss);
        },
        py::arg("points"), py::arg("labels"), py::arg("num_classes") = 2, py::arg("epochs") = 50,
        py::arg("batch_size") = 128, py::arg("lr") = 1e-3,
        py::arg("hidden") = std::vector<std::size_t>{128, 128, 128, 128},
        py::arg("activation") = "silu", py::arg("objective") = "symmetric", py::arg("seed") = 1,
        py::arg("dim_y") = 1, py::arg("beta") = 0.0, py::arg("init_seed") = 1);

    m.def(
        "generate",
        [](const VelocityModel& model, std::size_t class_idx, std::size_t n,
           std::size_t num_classes, std::size_t steps, const std::string& scheme,
           std::uint64_t seed, double beta) {
            const ClassCodebook cb = codebook_for(model, num_classes, beta);
            SeededRng rng(seed);
            return generate(model, cb, class_idx, n, solver_of(scheme, steps), rng);
        },
        py::arg("model"), py::arg("class_idx"), py::arg("n"), py::arg("num_classes") = 2,
        py::arg("steps") = 20, py::arg("scheme") = "euler", py::arg("seed") = 0,
        py::arg("beta") = 0.0);

    m.def(
        "classify",
        [](const VelocityModel& model, const PointList& points, std::size_t num_classes,
           std::size_t steps, const std::string& scheme, std::uint64_t seed, std::size_t ensemble,
           double beta) {
            const ClassCodebook cb = codebook_for(model, num_classes, beta);
            SeededRng rng(seed);
            LabelList labels;
            PointList codes;
            for (const auto& p : points) {
                const Classification c =
                    classify(model, cb, p, solver_of(scheme, steps), rng, ensemble);
                labels.push_back(c.label);
                codes.push_back(c.y0);
            }
            return std::make_pair(labels, codes);
        },
        py::arg("model"), py::arg("points"), py::arg("num_classes") = 2, py::arg("steps") = 20,
        py::arg("scheme") = "euler", py::arg("seed") = 0, py::arg("ensemble") = 1,
        py::arg("beta") = 0.0);

    m.def(
        "sweep",
        [](const VelocityModel& model, const PointList& points, const LabelList& labels,
           const std::vector<std::size_t>& step_counts, std::size_t num_classes,
           const std::string& scheme, std::uint64_t seed, double beta) {
            const ClassCodebook cb = codebook_for(model, num_classes, beta);
            const Dataset ds = dataset_from(points, labels, num_classes);
            const SweepResult r = sweep_steps(model, cb, ds, step_counts,
                                              scheme_from_name(scheme), seed);
            std::vector<std::pair<std::size_t, double>> rows;
            for (std::size_t i = 0; i < r.steps.size(); ++i) {
                rows.emplace_back(r.steps[i], r.accuracy[i]);
            }
            return rows;
        },
        py::arg("model"), py::arg("points"), py::arg("labels"), py::arg("step_counts"),
        py::arg("num_classes") = 2, py::arg("scheme") = "euler", py::arg("seed") = 0,
        py::arg("beta") = 0.0);

    m.def(
        "bayes_classify",
        [](const VelocityModel& model, const PointList& points, std::size_t num_classes,
           std::size_t n_mc, std::uint64_t seed, double beta) {
            const ClassCodebook cb = codebook_for(model, num_classes, beta);
            SeededRng rng(seed);
            LabelList labels;
            PointList posteriors;
            for (const auto& p : points) {
                const BayesResult b = bayes_classify(model, cb, p, n_mc, rng);
                labels.push_back(b.label);
                posteriors.push_back(b.posterior);
            }
            return std::make_pair(labels, posteriors);
        },
        py::arg("model"), py::arg("points"), py::arg("num_classes") = 2, py::arg("n_mc") = 64,
        py::arg("seed") = 0, py::arg("beta") = 0.0);

    m.def(
        "mmd2",
        [](const PointList& a, const PointList& b, double bandwidth) {
            if (!(bandwidth > 0.0)) {
                PointList pooled = a;
                pooled.insert(pooled.end(), b.begin(), b.end());
                bandwidth = median_heuristic_bandwidth(pooled);
            }
            return std::make_pair(mmd_rbf(a, b, bandwidth), bandwidth);
        },
        py::arg("a"), py::arg("b"), py::arg("bandwidth") = 0.0);
}
