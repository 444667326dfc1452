#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "rnlab/scenarios.hpp"

namespace {

// exit codes: 0 pass, 1 acceptance-check failure, 2 config error, 3 numerical
int run(const std::string& scenario, const std::string& config_path,
        std::optional<std::uint64_t> seed, std::optional<std::string> out_dir,
        std::optional<int> threads) {
    rnlab::Config raw = config_path.empty() ? rnlab::Config{}
                                            : rnlab::Config::parse_file(config_path);
    raw.set("run.scenario", scenario);
    if (seed) raw.set("run.seed", std::to_string(*seed));
    if (out_dir) raw.set("run.out_dir", *out_dir);
    if (threads) raw.set("run.threads", std::to_string(*threads));

    rnlab::ExperimentConfig config = rnlab::load_experiment_config(raw);
    const rnlab::ExperimentReport report = rnlab::run_scenario(config);
    rnlab::emit_report(report, config.out_dir);
    std::cout << "scenario " << report.scenario << ": "
              << (report.all_passed() ? "pass" : "FAIL") << " ("
              << report.wall_seconds << " s), report in " << config.out_dir << "\n";
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the 1D stochastic continuity equation "
                 "with rough random drift"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global flags after the subcommand too

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    app.add_option("--config", config_path, "config file (key=value with [sections])");
    app.add_option("--seed", seed, "master seed override");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--threads", threads, "worker thread count");

    const std::vector<std::string> scenarios = {
        "simulate", "lemma-sweep", "commutator", "selection",
        "stability", "negative-example", "hypothesis-check"};
    for (const auto& name : scenarios) app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

    const std::string chosen = app.get_subcommands().front()->get_name();
    try {
        return run(chosen, config_path, seed, out_dir, threads);
    } catch (const rnlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rnlab::MissingData& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
