#include "rnlab/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rnlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value, got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string Config::require_str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: '" + it->second + "'");
    }
}

double Config::require_double(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing required config key: " + key);
    return get_double(key, 0.0);
}

int Config::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, fallback);
    if (std::abs(v - std::lround(v)) > 1e-9)
        throw ConfigError("config key " + key + ": expected an integer");
    return static_cast<int>(std::lround(v));
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not an unsigned integer");
    }
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": bad list entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
}

std::vector<int> Config::get_ints(const std::string& key,
                                  const std::vector<int>& fallback) const {
    std::vector<double> dfall(fallback.begin(), fallback.end());
    std::vector<double> vals = get_doubles(key, dfall);
    std::vector<int> out;
    for (double v : vals) {
        if (std::abs(v - std::lround(v)) > 1e-9)
            throw ConfigError("config key " + key + ": expected integers");
        out.push_back(static_cast<int>(std::lround(v)));
    }
    return out;
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string Config::echo() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
    return out.str();
}

ExperimentConfig load_experiment_config(const Config& config) {
    ExperimentConfig ec;
    ec.raw = config;
    ec.scenario = config.get_str("run.scenario", "");
    ec.seed = config.get_u64("run.seed", 0);
    ec.threads = config.get_int("run.threads", 1);
    ec.out_dir = config.get_str("run.out_dir", "out");

    ec.drift_name = config.get_str("drift.name", "zero");
    ec.drift_base = config.get_str("drift.base", "bump");
    ec.drift_c = config.get_double("drift.c", 1.0);
    ec.drift_lambda = config.get_double("drift.lambda", 1.0);
    ec.drift_kappa = config.get_double("drift.kappa", 1.0);
    ec.drift_center = config.get_double("drift.center", 0.0);
    ec.drift_width = config.get_double("drift.width", 1.0);
    ec.drift_box_lo = config.get_double("drift.box_lo", 0.0);
    ec.drift_box_hi = config.get_double("drift.box_hi", 1.0);
    ec.drift_cutoff_radius = config.get_double("drift.cutoff_radius", 4.0);

    ec.u0_name = config.get_str("u0.name", "bump");
    ec.u0_center = config.get_double("u0.center", 0.0);
    ec.u0_width = config.get_double("u0.width", 1.0);
    ec.u0_amplitude = config.get_double("u0.amplitude", 1.0);

    ec.L = config.get_double("domain.L", 10.0);
    ec.T = config.get_double("domain.T", 1.0);
    ec.dt = config.get_double("domain.dt", 1e-3);
    ec.dx = config.get_double("domain.dx", 1e-2);
    ec.eps_list = config.get_doubles("sweep.eps_list", ec.eps_list);
    ec.n_list = config.get_ints("sweep.n_list", ec.n_list);
    ec.n_paths = config.get_int("sweep.n_paths", 100);
    ec.mass_rel_tol = config.get_double("tolerances.mass_rel_tol", 0.05);
    ec.decay_ratio_cap = config.get_double("tolerances.decay_ratio_cap", 0.5);
    return ec;
}

void ExperimentConfig::validate() const {
    if (!(L > 0.0)) throw ConfigError("domain.L must be positive");
    if (!(T > 0.0)) throw ConfigError("domain.T must be positive");
    if (!(dt > 0.0)) throw ConfigError("domain.dt must be positive");
    if (!(dx > 0.0)) throw ConfigError("domain.dx must be positive");
    if (n_paths < 1) throw ConfigError("sweep.n_paths must be >= 1");
    if (threads < 1) throw ConfigError("run.threads must be >= 1");
    if (eps_list.empty()) throw ConfigError("sweep.eps_list must be nonempty");
    for (double e : eps_list)
        if (!(e > 0.0)) throw ConfigError("sweep.eps_list entries must be positive");

    const bool rough = (drift_name == "sign_sqrt" || drift_name == "box");
    if (rough) {
        double min_eps = eps_list[0];
        for (double e : eps_list) min_eps = std::min(min_eps, e);
        if (dt > min_eps * min_eps / 4.0 + 1e-15)
            throw ConfigError("rough drift requires dt <= min(eps)^2/4; lower domain.dt");
        if (dx > min_eps / 8.0 + 1e-15)
            throw ConfigError("rough drift requires dx <= min(eps)/8; lower domain.dx");
    }
}

}  // namespace rnlab
