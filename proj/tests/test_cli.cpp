#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "biflow/io.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using biflow::atomic_write;
using biflow::read_file;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr merged
};

std::string cli_binary() {
    const char* env = std::getenv("BIFLOW_CLI");
    REQUIRE_MESSAGE(env != nullptr, "BIFLOW_CLI must point at the built binary");
    return env;
}

RunResult run_cli(const std::string& args) {
    const std::string cmd = cli_binary() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    std::array<char, 4096> buf;
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
        res.output.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path fresh_dir(const char* tag) {
    fs::path dir = fs::temp_directory_path() / (std::string("biflow_cli_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string small_config(const fs::path& dir) {
    const fs::path path = dir / "config.json";
    atomic_write(path.string(),
                 R"({"dataset": {"n_per_class": 120},
                     "train": {"epochs": 1},
                     "network": {"hidden_widths": [16, 16]}})");
    return path.string();
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += (c == '\n');
    return n;
}

// Runs gen-data + a 1-epoch train into `dir` and returns the config path.
std::string prepared_run(const fs::path& dir) {
    const std::string cfg = small_config(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();
    REQUIRE(run_cli(base + " gen-data").exit_code == 0);
    REQUIRE(run_cli(base + " train").exit_code == 0);
    return cfg;
}

}  // namespace

TEST_CASE("gen-data writes the split and reruns byte-identically") {
    const fs::path dir = fresh_dir("gen");
    const std::string cfg = small_config(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();

    const RunResult r = run_cli(base + " gen-data");
    CHECK(r.exit_code == 0);
    const std::string train_csv = read_file((dir / "train.csv").string());
    const std::string test_csv = read_file((dir / "test.csv").string());
    CHECK(count_lines(train_csv) == 181);  // header + 75% of 240
    CHECK(count_lines(test_csv) == 61);
    CHECK(fs::exists(dir / "config.json"));

    REQUIRE(run_cli(base + " gen-data").exit_code == 0);
    CHECK(read_file((dir / "train.csv").string()) == train_csv);
    CHECK(read_file((dir / "test.csv").string()) == test_csv);
    fs::remove_all(dir);
}

TEST_CASE("malformed configs fail loudly and name the field") {
    const fs::path dir = fresh_dir("badcfg");
    const fs::path cfg = dir / "bad.json";

    atomic_write(cfg.string(), R"({"dataset": {"n_per_klass": 10}})");
    RunResult r = run_cli("--config " + cfg.string() + " gen-data");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("n_per_klass") != std::string::npos);

    atomic_write(cfg.string(), "{ definitely not json");
    r = run_cli("--config " + cfg.string() + " gen-data");
    CHECK(r.exit_code != 0);

    r = run_cli("--config " + (dir / "absent.json").string() + " gen-data");
    CHECK(r.exit_code != 0);
    fs::remove_all(dir);
}

TEST_CASE("train writes checkpoint, loss history, and the resolved config") {
    const fs::path dir = fresh_dir("train");
    prepared_run(dir);
    CHECK(fs::exists(dir / "checkpoint.txt"));
    const std::string loss = read_file((dir / "loss.csv").string());
    CHECK(count_lines(loss) == 2);
    CHECK(loss.substr(0, loss.find('\n')) == "epoch,mean_loss");
    const std::string echoed = read_file((dir / "config.json").string());
    CHECK(echoed.find("\"epochs\": 1") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("resume with zero epochs leaves the checkpoint untouched") {
    const fs::path dir = fresh_dir("resume");
    const std::string cfg = prepared_run(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();
    const std::string before = read_file((dir / "checkpoint.txt").string());

    const RunResult r = run_cli(base + " train --resume " + (dir / "checkpoint.txt").string() +
                                " --epochs 0");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("no epochs run") != std::string::npos);
    CHECK(read_file((dir / "checkpoint.txt").string()) == before);
    CHECK(count_lines(read_file((dir / "loss.csv").string())) == 1);  // header only
    fs::remove_all(dir);
}

TEST_CASE("sample respects the count and the seed") {
    const fs::path dir = fresh_dir("sample");
    const std::string cfg = prepared_run(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();

    REQUIRE(run_cli(base + " sample --class 0 --n 0").exit_code == 0);
    const std::string empty = read_file((dir / "samples.csv").string());
    CHECK(empty == "x0,x1,label\n");

    REQUIRE(run_cli(base + " --seed 5 sample --class 1 --n 5").exit_code == 0);
    const std::string first = read_file((dir / "samples.csv").string());
    CHECK(count_lines(first) == 6);
    CHECK(first.find("x0,x1,label") == 0);

    REQUIRE(run_cli(base + " --seed 5 sample --class 1 --n 5").exit_code == 0);
    CHECK(read_file((dir / "samples.csv").string()) == first);

    REQUIRE(run_cli(base + " --seed 6 sample --class 1 --n 5").exit_code == 0);
    CHECK(read_file((dir / "samples.csv").string()) != first);

    // all rows carry the conditioning class
    for (std::size_t pos = first.find('\n'); pos != std::string::npos;
         pos = first.find('\n', pos + 1)) {
        const std::size_t eol = first.find('\n', pos + 1);
        if (eol == std::string::npos) break;
        const std::string row = first.substr(pos + 1, eol - pos - 1);
        CHECK(row.substr(row.rfind(',') + 1) == "1");
    }
    fs::remove_all(dir);
}

TEST_CASE("sample can emit svg and a trajectory") {
    const fs::path dir = fresh_dir("svg");
    const std::string cfg = prepared_run(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();
    const fs::path svg = dir / "plot.svg";
    const fs::path traj = dir / "traj.csv";

    REQUIRE(run_cli(base + " sample --class 0 --n 20 --svg " + svg.string() + " --real " +
                    (dir / "test.csv").string() + " --trajectory " + traj.string())
                .exit_code == 0);
    const std::string svg_text = read_file(svg.string());
    CHECK(svg_text.find("<svg") != std::string::npos);
    CHECK(svg_text.find("<circle") != std::string::npos);
    const std::string traj_text = read_file(traj.string());
    CHECK(traj_text.find("step,t,x0,x1,y0") == 0);
    CHECK(count_lines(traj_text) == 22);  // header + 21 grid points
    fs::remove_all(dir);
}

TEST_CASE("classify reports accuracy for labeled input and skips it otherwise") {
    const fs::path dir = fresh_dir("classify");
    const std::string cfg = prepared_run(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();

    RunResult r = run_cli(base + " classify --input " + (dir / "test.csv").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("accuracy") != std::string::npos);
    const std::string preds = read_file((dir / "predictions.csv").string());
    CHECK(preds.find("pred,y0") == 0);
    CHECK(preds.find("# accuracy,") != std::string::npos);

    // strip the label column to make an unlabeled file
    std::string unlabeled = "x0,x1\n";
    const std::string test_csv = read_file((dir / "test.csv").string());
    for (std::size_t pos = test_csv.find('\n') + 1; pos < test_csv.size();) {
        const std::size_t eol = test_csv.find('\n', pos);
        const std::string row = test_csv.substr(pos, eol - pos);
        unlabeled += row.substr(0, row.rfind(',')) + "\n";
        pos = eol + 1;
    }
    atomic_write((dir / "unlabeled.csv").string(), unlabeled);

    r = run_cli(base + " classify --input " + (dir / "unlabeled.csv").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("accuracy") == std::string::npos);
    CHECK(read_file((dir / "predictions.csv").string()).find("# accuracy") ==
          std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("classify bayes emits per-class posteriors") {
    const fs::path dir = fresh_dir("bayes");
    const std::string cfg = prepared_run(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();

    const RunResult r =
        run_cli(base + " classify --input " + (dir / "test.csv").string() + " --method bayes");
    CHECK(r.exit_code == 0);
    const std::string preds = read_file((dir / "predictions.csv").string());
    CHECK(preds.find("pred,p0,p1") == 0);

    const RunResult bad =
        run_cli(base + " classify --input " + (dir / "test.csv").string() + " --method knn");
    CHECK(bad.exit_code != 0);
    CHECK(bad.output.find("knn") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("sweep covers the requested step counts deterministically") {
    const fs::path dir = fresh_dir("sweep");
    const std::string cfg = prepared_run(dir);
    const std::string base = "--config " + cfg + " --out " + dir.string();

    RunResult r = run_cli(base + " sweep");
    CHECK(r.exit_code == 0);
    const std::string sweep = read_file((dir / "sweep.csv").string());
    CHECK(count_lines(sweep) == 7);  // header + {1,2,5,10,20,50}
    CHECK(sweep.find("steps,accuracy\n1,") != std::string::npos);
    CHECK(sweep.find("\n50,") != std::string::npos);

    REQUIRE(run_cli(base + " sweep").exit_code == 0);
    CHECK(read_file((dir / "sweep.csv").string()) == sweep);

    r = run_cli(base + " sweep --steps 4");
    CHECK(r.exit_code == 0);
    CHECK(count_lines(read_file((dir / "sweep.csv").string())) == 2);

    CHECK(run_cli(base + " sweep --steps 5,3").exit_code != 0);
    CHECK(run_cli(base + " sweep --steps 0").exit_code != 0);
    CHECK(run_cli(base + " sweep --steps 2,x").exit_code != 0);
    fs::remove_all(dir);
}

TEST_CASE("gradcheck passes clean and fails the negative control") {
    const RunResult ok = run_cli("gradcheck");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("max relative error") != std::string::npos);
    CHECK(ok.output.find("layer 0") != std::string::npos);
    CHECK(ok.output.find("layer 2") != std::string::npos);
    CHECK(ok.output.find("PASS") != std::string::npos);

    const RunResult bad = run_cli("gradcheck --corrupt-backward");
    CHECK(bad.exit_code != 0);
    CHECK(bad.output.find("FAIL") != std::string::npos);
}

TEST_CASE("bad invocations exit nonzero without leaving artifacts") {
    const fs::path dir = fresh_dir("bad");
    CHECK(run_cli("").exit_code != 0);
    CHECK(run_cli("frobnicate").exit_code != 0);
    CHECK(run_cli("sample --n 3 --out " + dir.string()).exit_code != 0);  // --class required

    const RunResult r = run_cli("--out " + dir.string() + " classify --input " +
                                (dir / "absent.csv").string());
    CHECK(r.exit_code != 0);
    CHECK(!fs::exists(dir / "predictions.csv"));
    fs::remove_all(dir);
}
