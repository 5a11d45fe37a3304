#include "biflow/config.hpp"

#include <numbers>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "biflow/io.hpp"

namespace biflow {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config field '" + path + "': " + why);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) bad_field(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) bad_field(path.empty() ? key : path + "." + key, "unknown key");
    }
}

template <typename T>
void read(const json& obj, const std::string& path, const std::string& key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        bad_field(path + "." + key, e.what());
    }
}

void read_positive(const json& obj, const std::string& path, const std::string& key,
                   std::size_t& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        bad_field(path + "." + key, "expected a positive integer");
    }
    out = v.get<std::size_t>();
}

void parse_dataset(const json& j, DatasetSpec& spec) {
    check_keys(j, "dataset",
               {"generator", "n_per_class", "num_classes", "theta_lo", "theta_hi", "noise_sigma",
                "k_components", "seed", "test_fraction", "split_seed"});
    read(j, "dataset", "generator", spec.generator);
    if (spec.generator != "two-spirals" && spec.generator != "gaussian-mixture") {
        bad_field("dataset.generator", "expected two-spirals or gaussian-mixture");
    }
    read_positive(j, "dataset", "n_per_class", spec.n_per_class);
    read_positive(j, "dataset", "num_classes", spec.num_classes);
    read(j, "dataset", "theta_lo", spec.theta_lo);
    read(j, "dataset", "theta_hi", spec.theta_hi);
    read(j, "dataset", "noise_sigma", spec.noise_sigma);
    read_positive(j, "dataset", "k_components", spec.k_components);
    read(j, "dataset", "seed", spec.seed);
    read(j, "dataset", "test_fraction", spec.test_fraction);
    read(j, "dataset", "split_seed", spec.split_seed);
    if (spec.generator == "two-spirals" && spec.num_classes != 2) {
        bad_field("dataset.num_classes", "two-spirals always has 2 classes");
    }
    if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0)) {
        bad_field("dataset.test_fraction", "expected a value in [0,1)");
    }
    if (spec.noise_sigma < 0.0) bad_field("dataset.noise_sigma", "expected >= 0");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "",
               {"dataset", "codebook", "network", "train", "solver", "classify", "seed",
                "out_dir"});

    ExperimentConfig c;
    if (j.contains("dataset")) parse_dataset(j.at("dataset"), c.dataset);

    if (j.contains("codebook")) {
        const json& cb = j.at("codebook");
        // centers and min_center_distance are derived echoes; accepted so an
        // echoed config reloads, recomputed rather than read.
        check_keys(cb, "codebook",
                   {"num_classes", "dim_y", "beta", "centers", "min_center_distance"});
        read_positive(cb, "codebook", "num_classes", c.codebook_classes);
        read_positive(cb, "codebook", "dim_y", c.dim_y);
        read(cb, "codebook", "beta", c.beta);
        if (cb.contains("beta") && !(c.beta > 0.0)) bad_field("codebook.beta", "expected > 0");
    }

    if (j.contains("network")) {
        const json& net = j.at("network");
        check_keys(net, "network", {"hidden_widths", "activation", "time_encoding", "init_seed"});
        read(net, "network", "hidden_widths", c.hidden_widths);
        if (c.hidden_widths.empty()) {
            bad_field("network.hidden_widths", "expected at least one hidden layer");
        }
        for (std::size_t w : c.hidden_widths) {
            if (w == 0) bad_field("network.hidden_widths", "widths must be positive");
        }
        if (net.contains("activation")) {
            try {
                c.activation = activation_from_name(net.at("activation").get<std::string>());
            } catch (const std::exception& e) {
                bad_field("network.activation", e.what());
            }
        }
        if (net.contains("time_encoding")) {
            try {
                c.time_encoding =
                    time_encoding_from_name(net.at("time_encoding").get<std::string>());
            } catch (const std::exception& e) {
                bad_field("network.time_encoding", e.what());
            }
        }
        read(net, "network", "init_seed", c.init_seed);
    }

    if (j.contains("train")) {
        const json& tr = j.at("train");
        check_keys(tr, "train",
                   {"epochs", "batch_size", "lr", "beta1", "beta2", "eps", "objective",
                    "cosine_lr", "seed"});
        read(tr, "train", "epochs", c.train.epochs);
        read_positive(tr, "train", "batch_size", c.train.batch_size);
        read(tr, "train", "lr", c.train.adam.lr);
        read(tr, "train", "beta1", c.train.adam.beta1);
        read(tr, "train", "beta2", c.train.adam.beta2);
        read(tr, "train", "eps", c.train.adam.eps);
        if (tr.contains("objective")) {
            try {
                c.train.objective = objective_from_name(tr.at("objective").get<std::string>());
            } catch (const std::exception& e) {
                bad_field("train.objective", e.what());
            }
        }
        read(tr, "train", "cosine_lr", c.train.cosine_lr);
        read(tr, "train", "seed", c.train.seed);
        if (!(c.train.adam.lr > 0.0)) bad_field("train.lr", "expected > 0");
    }

    if (j.contains("solver")) {
        const json& so = j.at("solver");
        check_keys(so, "solver", {"scheme", "steps", "freeze_x"});
        if (so.contains("scheme")) {
            try {
                c.solver.scheme = scheme_from_name(so.at("scheme").get<std::string>());
            } catch (const std::exception& e) {
                bad_field("solver.scheme", e.what());
            }
        }
        read_positive(so, "solver", "steps", c.solver.steps);
        read(so, "solver", "freeze_x", c.solver.freeze_x);
    }

    if (j.contains("classify")) {
        const json& cl = j.at("classify");
        check_keys(cl, "classify", {"ensemble", "n_mc"});
        read_positive(cl, "classify", "ensemble", c.classify_ensemble);
        read_positive(cl, "classify", "n_mc", c.bayes_n_mc);
    }

    read(j, "", "seed", c.seed);
    read(j, "", "out_dir", c.out_dir);
    if (c.out_dir.empty()) bad_field("out_dir", "expected a non-empty path");
    return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

Dataset make_dataset(const DatasetSpec& spec) {
    if (spec.generator == "two-spirals") {
        SpiralConfig sc;
        sc.n_per_class = spec.n_per_class;
        if (spec.theta_lo > 0.0) sc.theta_lo = spec.theta_lo;
        if (spec.theta_hi > 0.0) sc.theta_hi = spec.theta_hi;
        sc.noise_sigma = spec.noise_sigma;
        sc.seed = spec.seed;
        return two_spirals(sc);
    }
    return gaussian_mixture(spec.k_components, spec.n_per_class, spec.num_classes, spec.seed);
}

ClassCodebook make_codebook(const ExperimentConfig& config) {
    const std::size_t classes =
        config.codebook_classes > 0 ? config.codebook_classes : config.dataset.num_classes;
    const double beta = config.beta > 0.0 ? config.beta : default_beta(classes);
    return build_codebook(classes, config.dim_y, beta);
}

VelocityModel make_model(const ExperimentConfig& config) {
    const std::size_t dim_x = 2;  // both generators are planar
    return build_velocity_model(dim_x, config.dim_y, config.hidden_widths, config.activation,
                                config.time_encoding, config.init_seed);
}

std::string config_to_json(const ExperimentConfig& config) {
    const ClassCodebook cb = make_codebook(config);
    json j;
    json& ds = j["dataset"];
    ds["generator"] = config.dataset.generator;
    ds["n_per_class"] = config.dataset.n_per_class;
    ds["num_classes"] = config.dataset.num_classes;
    if (config.dataset.generator == "two-spirals") {
        SpiralConfig sc;
        ds["theta_lo"] = config.dataset.theta_lo > 0.0 ? config.dataset.theta_lo : sc.theta_lo;
        ds["theta_hi"] = config.dataset.theta_hi > 0.0 ? config.dataset.theta_hi : sc.theta_hi;
        ds["noise_sigma"] = config.dataset.noise_sigma;
    } else {
        ds["k_components"] = config.dataset.k_components;
    }
    ds["seed"] = config.dataset.seed;
    ds["test_fraction"] = config.dataset.test_fraction;
    ds["split_seed"] = config.dataset.split_seed;

    json& jc = j["codebook"];
    jc["num_classes"] = cb.num_classes;
    jc["dim_y"] = cb.dim_y;
    jc["beta"] = cb.beta;
    jc["centers"] = cb.centers;
    jc["min_center_distance"] = cb.min_center_distance;

    json& net = j["network"];
    net["hidden_widths"] = config.hidden_widths;
    net["activation"] = activation_name(config.activation);
    net["time_encoding"] = time_encoding_name(config.time_encoding);
    net["init_seed"] = config.init_seed;

    json& tr = j["train"];
    tr["epochs"] = config.train.epochs;
    tr["batch_size"] = config.train.batch_size;
    tr["lr"] = config.train.adam.lr;
    tr["beta1"] = config.train.adam.beta1;
    tr["beta2"] = config.train.adam.beta2;
    tr["eps"] = config.train.adam.eps;
    tr["objective"] = objective_name(config.train.objective);
    tr["cosine_lr"] = config.train.cosine_lr;
    tr["seed"] = config.train.seed;

    json& so = j["solver"];
    so["scheme"] = scheme_name(config.solver.scheme);
    so["steps"] = config.solver.steps;
    so["freeze_x"] = config.solver.freeze_x;

    json& cl = j["classify"];
    cl["ensemble"] = config.classify_ensemble;
    cl["n_mc"] = config.bayes_n_mc;

    j["seed"] = config.seed;
    j["out_dir"] = config.out_dir;
    return j.dump(2) + "\n";
}

}  // namespace biflow
