#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rnlab/errors.hpp"

namespace rnlab {

/// Flat, line-oriented key=value config with [section] headers. Keys are
/// stored as "section.key"; files can be diffed and echoed verbatim.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get_str(const std::string& key, const std::string& fallback) const;
    std::string require_str(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;
    std::vector<int> get_ints(const std::string& key,
                              const std::vector<int>& fallback) const;
    void set(const std::string& key, const std::string& value);

    /// Canonical text form (sorted keys), embedded in every report for replay.
    std::string echo() const;

  private:
    std::map<std::string, std::string> kv_;
};

/// A fully resolved experiment configuration.
struct ExperimentConfig {
    std::string scenario;
    std::string drift_name = "zero";
    std::string drift_base = "bump";   // for shifted
    double drift_c = 1.0;
    double drift_lambda = 1.0;
    double drift_kappa = 1.0;
    double drift_center = 0.0;
    double drift_width = 1.0;
    double drift_box_lo = 0.0;
    double drift_box_hi = 1.0;
    double drift_cutoff_radius = 4.0;

    std::string u0_name = "bump";      // bump | box | gauss
    double u0_center = 0.0;
    double u0_width = 1.0;
    double u0_amplitude = 1.0;

    double L = 10.0;
    double T = 1.0;
    double dt = 1e-3;
    double dx = 1e-2;
    std::vector<double> eps_list = {0.5, 0.25, 0.125, 0.0625, 0.03125};
    std::vector<int> n_list = {2, 4, 8, 16};
    int n_paths = 100;
    std::uint64_t seed = 0;
    int threads = 1;
    double mass_rel_tol = 0.05;
    double decay_ratio_cap = 0.5;      // commutator acceptance knob
    std::string out_dir = "out";

    Config raw;

    /// Refuses invalid combinations instead of clamping; throws ConfigError
    /// naming the violated invariant.
    void validate() const;
};

ExperimentConfig load_experiment_config(const Config& config);

}  // namespace rnlab
