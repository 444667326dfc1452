#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rnlab/io.hpp"
#include "rnlab/report.hpp"
#include "rnlab/scenarios.hpp"

using namespace rnlab;

namespace {
std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST_CASE("config parsing: sections, comments, typed getters") {
    Config c = Config::parse_string(
        "# comment\n"
        "[run]\n"
        "scenario = simulate\n"
        "seed=42\n"
        "\n"
        "[sweep]\n"
        "eps_list = 0.5, 0.25,0.125\n"
        "n_list = 2,4\n");
    CHECK(c.require_str("run.scenario") == "simulate");
    CHECK(c.get_u64("run.seed", 0) == 42);
    CHECK(c.get_doubles("sweep.eps_list", {}) ==
          std::vector<double>{0.5, 0.25, 0.125});
    CHECK(c.get_ints("sweep.n_list", {}) == std::vector<int>{2, 4});
    CHECK(c.get_double("missing.key", 3.5) == 3.5);
    CHECK_THROWS_AS(c.require_str("missing.key"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("[run]\nno_equals_sign\n"), ConfigError);
}

TEST_CASE("config echo round-trips") {
    Config c = Config::parse_string("[a]\nx = 1\n[b]\ny = two\n");
    Config c2 = Config::parse_string(c.echo());
    CHECK(c2.echo() == c.echo());
}

TEST_CASE("experiment config validation refuses bad grids") {
    Config c = Config::parse_string(
        "[run]\nscenario = lemma-sweep\n[drift]\nname = sign_sqrt\n"
        "[domain]\ndt = 0.01\ndx = 0.01\n[sweep]\neps_list = 0.0625\n");
    ExperimentConfig e = load_experiment_config(c);
    // dt = 1e-2 > eps^2/4 ~ 9.8e-4 for a rough drift
    CHECK_THROWS_AS(e.validate(), ConfigError);

    Config ok = Config::parse_string(
        "[run]\nscenario = lemma-sweep\n[drift]\nname = sign_sqrt\n"
        "[domain]\ndt = 0.0009\ndx = 0.0078\n[sweep]\neps_list = 0.0625\n");
    CHECK_NOTHROW(load_experiment_config(ok).validate());
}

TEST_CASE("binary table round trip") {
    Eigen::MatrixXd m(3, 2);
    m << 1.0, -2.5, 3.25, 0.0, 1e-300, 7.0;
    const std::string path = "test_table_rt.bin";
    io::write_binary_table(path, m);
    Eigen::MatrixXd back = io::read_binary_table(path);
    CHECK(back.rows() == 3);
    CHECK(back.cols() == 2);
    CHECK((back.array() == m.array()).all());
    std::remove(path.c_str());
}

TEST_CASE("emit_report writes deterministic files") {
    ExperimentReport r;
    r.scenario = "demo";
    r.config_echo = "[run]\nscenario = demo\n";
    r.seed = 3;
    r.tables.push_back({"numbers", {"a", "b"}, {{1.0, 2.0}, {0.5, -1.0}}});
    r.checks.emplace_back("example_check", true);
    r.wall_seconds = 123.0;  // must not appear in the files

    const std::filesystem::path dir1 = "test_report_a", dir2 = "test_report_b";
    emit_report(r, dir1.string());
    r.wall_seconds = 456.0;
    emit_report(r, dir2.string());
    CHECK(slurp(dir1 / "report.txt") == slurp(dir2 / "report.txt"));
    CHECK(slurp(dir1 / "numbers.csv") == slurp(dir2 / "numbers.csv"));
    CHECK(slurp(dir1 / "report.txt").find("example_check") != std::string::npos);
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("simulate scenario: zero drift run passes and replays byte-identically") {
    Config c = Config::parse_string(
        "[run]\nscenario = simulate\nseed = 11\n"
        "[drift]\nname = zero\n[u0]\nname = gauss\nwidth = 0.5\n"
        "[domain]\nL = 6\nT = 0.25\ndt = 0.005\ndx = 0.05\n");
    ExperimentConfig e = load_experiment_config(c);
    e.out_dir = "test_sim_a";
    ExperimentReport r1 = run_scenario(e);
    CHECK(r1.all_passed());
    emit_report(r1, e.out_dir);
    e.out_dir = "test_sim_b";
    e.threads = 4;
    ExperimentReport r2 = run_scenario(e);
    emit_report(r2, e.out_dir);
    CHECK(slurp("test_sim_a/report.txt") == slurp("test_sim_b/report.txt"));
    CHECK(slurp("test_sim_a/density.bin") == slurp("test_sim_b/density.bin"));
    std::filesystem::remove_all("test_sim_a");
    std::filesystem::remove_all("test_sim_b");
}

TEST_CASE("hypothesis-check scenario reports the catalog norms") {
    Config c = Config::parse_string(
        "[run]\nscenario = hypothesis-check\nseed = 2\n"
        "[drift]\nname = box\n[domain]\nL = 10\nT = 1\n[sweep]\neps_list = 0.5\n"
        "[caps]\nb_sup = 2.0\nb_sup_t_l1x = 2.0\n");
    ExperimentConfig e = load_experiment_config(c);
    e.out_dir = "test_hyp";
    ExperimentReport r = run_scenario(e);
    CHECK(r.all_passed());
    REQUIRE(!r.tables.empty());
    std::filesystem::remove_all("test_hyp");
}

TEST_CASE("unknown scenario is a config error") {
    Config c = Config::parse_string("[run]\nscenario = frobnicate\n");
    ExperimentConfig e = load_experiment_config(c);
    CHECK_THROWS_AS(run_scenario(e), ConfigError);
}
