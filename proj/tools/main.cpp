#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "biflow/config.hpp"
#include "biflow/eval.hpp"
#include "biflow/io.hpp"
#include "biflow/svg.hpp"

namespace fs = std::filesystem;
using namespace biflow;

namespace {

const char* kPalette[] = {"#4878cf", "#ee854a", "#6acc65", "#d65f5f",
                          "#956cb4", "#8c613c", "#dc7ec0", "#797979"};

std::string class_color(std::size_t idx) { return kPalette[idx % 8]; }

std::string out_path(const ExperimentConfig& config, const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
}

VelocityModel load_model(const ExperimentConfig& config, const std::string& checkpoint_path) {
    VelocityModel model = make_model(config);
    MlpParams loaded = load_checkpoint(checkpoint_path);
    if (loaded.widths != model.params.widths) {
        throw std::runtime_error("checkpoint '" + checkpoint_path +
                                 "' has a different network shape than the config");
    }
    model.params = std::move(loaded);
    model.check_widths();
    return model;
}

void cmd_gen_data(const ExperimentConfig& config) {
    const Dataset full = make_dataset(config.dataset);
    Dataset train_set = full;
    Dataset test_set = full;
    if (config.dataset.test_fraction > 0.0) {
        std::tie(train_set, test_set) =
            split(full, config.dataset.test_fraction, config.dataset.split_seed);
    } else {
        test_set.points.clear();
        test_set.labels.clear();
    }
    atomic_write(out_path(config, "train.csv"), dataset_to_csv(train_set));
    atomic_write(out_path(config, "test.csv"), dataset_to_csv(test_set));
    atomic_write(out_path(config, "config.json"), config_to_json(config));
    std::printf("wrote %zu train / %zu test rows to %s\n", train_set.size(), test_set.size(),
                config.out_dir.c_str());
}

void cmd_train(const ExperimentConfig& config, const std::string& data_path,
               const std::string& resume_path, long long epochs_override) {
    const std::string data = data_path.empty() ? out_path(config, "train.csv") : data_path;
    const Dataset train_set = dataset_from_csv(read_file(data));
    const ClassCodebook codebook = make_codebook(config);

    VelocityModel model = resume_path.empty() ? make_model(config)
                                              : load_model(config, resume_path);
    TrainConfig tc = config.train;
    if (epochs_override >= 0) tc.epochs = static_cast<std::size_t>(epochs_override);

    std::vector<double> history;
    if (tc.epochs > 0) {
        TrainResult result = train(train_set, codebook, std::move(model), tc);
        model = std::move(result.model);
        history = std::move(result.epoch_loss);
    }
    atomic_write(out_path(config, "checkpoint.txt"), checkpoint_to_string(model.params));
    atomic_write(out_path(config, "loss.csv"), loss_history_to_csv(history));
    atomic_write(out_path(config, "config.json"), config_to_json(config));
    if (history.empty()) {
        std::printf("no epochs run; checkpoint written unchanged\n");
    } else {
        std::printf("trained %zu epochs, final mean loss %s\n", history.size(),
                    fmt_double(history.back()).c_str());
    }
}

void cmd_sample(const ExperimentConfig& config, const std::string& checkpoint_path,
                std::size_t class_idx, std::size_t n, const std::string& svg_path,
                const std::string& real_path, const std::string& traj_path) {
    const std::string ckpt =
        checkpoint_path.empty() ? out_path(config, "checkpoint.txt") : checkpoint_path;
    const VelocityModel model = load_model(config, ckpt);
    const ClassCodebook codebook = make_codebook(config);
    SeededRng rng(config.seed);

    const auto samples = generate(model, codebook, class_idx, n, config.solver, rng);
    const std::vector<std::size_t> labels(n, class_idx);
    atomic_write(out_path(config, "samples.csv"), points_to_csv(samples, &labels));
    std::printf("wrote %zu samples of class %zu\n", n, class_idx);

    if (!traj_path.empty()) {
        CoupledState start;
        start.t = 0.0;
        start.x = rng.normal_vector(model.dim_x);
        start.y = dequantize(codebook, class_idx, rng);
        const Trajectory traj = integrate(model, start, 1.0, config.solver);
        atomic_write(traj_path, trajectory_to_csv(traj));
    }

    if (!svg_path.empty()) {
        std::vector<ScatterGroup> groups;
        if (!real_path.empty()) {
            const PointsCsv real = read_points_csv(real_path);
            std::vector<ScatterGroup> by_class;
            for (std::size_t i = 0; i < real.points.size(); ++i) {
                const std::size_t cls = real.has_labels ? real.labels[i] : 0;
                while (by_class.size() <= cls) {
                    ScatterGroup g;
                    g.label = "real class " + std::to_string(by_class.size());
                    g.color = class_color(by_class.size());
                    g.radius = 2.0;
                    by_class.push_back(g);
                }
                if (real.points[i].size() != 2) {
                    throw std::invalid_argument("scatter plot needs 2-D points");
                }
                by_class[cls].points.push_back({real.points[i][0], real.points[i][1]});
            }
            groups = std::move(by_class);
        }
        ScatterGroup gen;
        gen.label = "generated class " + std::to_string(class_idx);
        gen.color = "#222222";
        gen.radius = 2.5;
        for (const auto& p : samples) {
            if (p.size() != 2) throw std::invalid_argument("scatter plot needs 2-D points");
            gen.points.push_back({p[0], p[1]});
        }
        groups.push_back(std::move(gen));
        atomic_write(svg_path, scatter_svg(groups));
    }
}

void cmd_classify(const ExperimentConfig& config, const std::string& checkpoint_path,
                  const std::string& input_path, const std::string& method) {
    const std::string ckpt =
        checkpoint_path.empty() ? out_path(config, "checkpoint.txt") : checkpoint_path;
    const VelocityModel model = load_model(config, ckpt);
    const ClassCodebook codebook = make_codebook(config);
    const PointsCsv input = read_points_csv(input_path);
    SeededRng rng(config.seed);

    std::string csv = "pred";
    if (method == "ode") {
        for (std::size_t j = 0; j < model.dim_y; ++j) csv += ",y" + std::to_string(j);
    } else if (method == "bayes") {
        for (std::size_t j = 0; j < codebook.num_classes; ++j) csv += ",p" + std::to_string(j);
    } else {
        throw std::invalid_argument("unknown method '" + method + "' (expected ode or bayes)");
    }
    csv += '\n';

    std::size_t correct = 0;
    for (std::size_t i = 0; i < input.points.size(); ++i) {
        std::size_t pred;
        std::vector<double> extra;
        if (method == "ode") {
            const Classification c = classify(model, codebook, input.points[i], config.solver,
                                              rng, config.classify_ensemble);
            pred = c.label;
            extra = c.y0;
        } else {
            const BayesResult b =
                bayes_classify(model, codebook, input.points[i], config.bayes_n_mc, rng);
            pred = b.label;
            extra = b.posterior;
        }
        csv += std::to_string(pred);
        for (double v : extra) csv += ',' + fmt_double(v);
        csv += '\n';
        if (input.has_labels && pred == input.labels[i]) ++correct;
    }

    if (input.has_labels && !input.points.empty()) {
        const double acc =
            static_cast<double>(correct) / static_cast<double>(input.points.size());
        csv += "# accuracy," + fmt_double(acc) + '\n';
        std::printf("accuracy %s on %zu points\n", fmt_double(acc).c_str(), input.points.size());
    }
    atomic_write(out_path(config, "predictions.csv"), csv);
}

std::vector<std::size_t> parse_steps(const std::string& text) {
    std::vector<std::size_t> steps;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string tok = text.substr(pos, next - pos);
        try {
            const long long v = std::stoll(tok);
            if (v < 1) throw std::invalid_argument("not positive");
            steps.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad step count '" + tok + "'");
        }
        pos = next + 1;
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (steps[i] <= steps[i - 1]) {
            throw std::invalid_argument("step counts must be strictly increasing");
        }
    }
    if (steps.empty()) throw std::invalid_argument("no step counts given");
    return steps;
}

void cmd_sweep(const ExperimentConfig& config, const std::string& checkpoint_path,
               const std::string& input_path, const std::string& steps_text,
               const std::string& svg_path) {
    const std::string ckpt =
        checkpoint_path.empty() ? out_path(config, "checkpoint.txt") : checkpoint_path;
    const VelocityModel model = load_model(config, ckpt);
    const ClassCodebook codebook = make_codebook(config);
    const std::string input = input_path.empty() ? out_path(config, "test.csv") : input_path;
    const Dataset dataset = dataset_from_csv(read_file(input));
    const std::vector<std::size_t> steps = parse_steps(steps_text);

    const SweepResult result =
        sweep_steps(model, codebook, dataset, steps, config.solver.scheme, config.seed,
                    config.classify_ensemble, config.solver.freeze_x);
    atomic_write(out_path(config, "sweep.csv"), sweep_to_csv(result));
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        std::printf("steps %4zu  accuracy %.4f\n", result.steps[i], result.accuracy[i]);
    }

    if (!svg_path.empty()) {
        LineSeries series;
        series.label = "accuracy";
        series.color = class_color(0);
        for (std::size_t i = 0; i < result.steps.size(); ++i) {
            series.points.push_back({static_cast<double>(result.steps[i]), result.accuracy[i]});
        }
        atomic_write(svg_path, line_chart_svg({series}, "steps", "accuracy", 640, 480, true));
    }
}

int cmd_gradcheck(const ExperimentConfig& config, bool corrupt) {
    VelocityModel model = build_velocity_model(2, config.dim_y, {8, 8}, config.activation,
                                               config.time_encoding, 42);
    SeededRng rng(1234);
    std::vector<CoupledSample> batch;
    for (int i = 0; i < 16; ++i) {
        CoupledSample s;
        s.x = rng.normal_vector(model.dim_x);
        s.y.resize(model.dim_y);
        for (double& v : s.y) v = rng.uniform(-1.0, 1.0);
        batch.push_back(std::move(s));
    }
    const FlowDraws draws = draw_flow_noise(batch.size(), model.dim_x, model.dim_y, rng);

    ParamTensors analytic;
    symmetric_loss(model, batch, draws, &analytic);
    if (corrupt) analytic.weights[0](0, 0) += 0.05;

    const auto loss_fn = [&](const MlpParams& p) {
        VelocityModel probe = model;
        probe.params = p;
        return symmetric_loss(probe, batch, draws);
    };
    const ParamTensors numeric = finite_diff_grad(loss_fn, model.params, 1e-5);
    const GradComparison cmp = compare_grads(analytic, numeric);

    std::printf("max relative error %.3e at %s\n", cmp.max_rel_error,
                cmp.worst_location.c_str());
    for (std::size_t k = 0; k < cmp.per_layer_max.size(); ++k) {
        std::printf("  layer %zu: %.3e\n", k, cmp.per_layer_max[k]);
    }
    const bool ok = cmp.max_rel_error < 1e-4;
    std::printf("tolerance 1e-4: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled two-way flow on toy data: train a joint velocity field, "
                 "sample it forward, classify by integrating backward"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_override = 0;
    std::string out_override;
    app.add_option("--config", config_path, "JSON experiment config file");
    auto* seed_opt = app.add_option("--seed", seed_override, "Override the runtime seed");
    auto* out_opt = app.add_option("--out", out_override, "Override the output directory");

    const auto resolve_config = [&]() {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seed_opt->count()) c.seed = seed_override;
        if (out_opt->count()) c.out_dir = out_override;
        return c;
    };

    CLI::App* gen = app.add_subcommand("gen-data", "Generate the dataset and write the split");
    gen->fallthrough();
    gen->callback([&]() { cmd_gen_data(resolve_config()); });

    CLI::App* tr = app.add_subcommand("train", "Train the velocity field");
    tr->fallthrough();
    std::string train_data, resume;
    long long epochs_override = -1;
    tr->add_option("--data", train_data, "Training CSV (default <out>/train.csv)");
    tr->add_option("--resume", resume, "Continue from an existing checkpoint");
    tr->add_option("--epochs", epochs_override, "Override the configured epoch count");
    tr->callback([&]() { cmd_train(resolve_config(), train_data, resume, epochs_override); });

    CLI::App* sa = app.add_subcommand("sample", "Generate class-conditional samples");
    sa->fallthrough();
    std::string sa_ckpt, sa_svg, sa_real, sa_traj;
    std::size_t sa_class = 0, sa_n = 1000;
    sa->add_option("--checkpoint", sa_ckpt, "Checkpoint path (default <out>/checkpoint.txt)");
    sa->add_option("--class", sa_class, "Conditioning class index")->required();
    sa->add_option("--n", sa_n, "Number of samples");
    sa->add_option("--svg", sa_svg, "Write a scatter plot here");
    sa->add_option("--real", sa_real, "Real points CSV to overlay in the plot");
    sa->add_option("--trajectory", sa_traj, "Write one forward trajectory CSV here");
    sa->callback([&]() {
        cmd_sample(resolve_config(), sa_ckpt, sa_class, sa_n, sa_svg, sa_real, sa_traj);
    });

    CLI::App* cl = app.add_subcommand("classify", "Classify points by backward integration");
    cl->fallthrough();
    std::string cl_ckpt, cl_input, cl_method = "ode";
    cl->add_option("--checkpoint", cl_ckpt, "Checkpoint path (default <out>/checkpoint.txt)");
    cl->add_option("--input", cl_input, "Points CSV, with or without labels")->required();
    cl->add_option("--method", cl_method, "ode or bayes");
    cl->callback([&]() { cmd_classify(resolve_config(), cl_ckpt, cl_input, cl_method); });

    CLI::App* sw = app.add_subcommand("sweep", "Accuracy across solver step counts");
    sw->fallthrough();
    std::string sw_ckpt, sw_input, sw_steps = "1,2,5,10,20,50", sw_svg;
    sw->add_option("--checkpoint", sw_ckpt, "Checkpoint path (default <out>/checkpoint.txt)");
    sw->add_option("--input", sw_input, "Labeled points CSV (default <out>/test.csv)");
    sw->add_option("--steps", sw_steps, "Comma-separated step counts, strictly increasing");
    sw->add_option("--svg", sw_svg, "Write an accuracy-vs-steps chart here");
    sw->callback([&]() {
        cmd_sweep(resolve_config(), sw_ckpt, sw_input, sw_steps, sw_svg);
    });

    CLI::App* gc = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
    gc->fallthrough();
    bool corrupt = false;
    gc->add_flag("--corrupt-backward", corrupt, "Negative control: perturb the analytic grads")
        ->group("");
    int gradcheck_rc = 0;
    gc->callback([&]() { gradcheck_rc = cmd_gradcheck(resolve_config(), corrupt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return gradcheck_rc;
}
