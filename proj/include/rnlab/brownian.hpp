#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "rnlab/errors.hpp"

namespace rnlab {

/// Uniform grid on [t_start, t_end] with n_steps steps (n_steps+1 nodes).
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double t0, double t1, int n) : t_start(t0), t_end(t1), n_steps(n) {
        if (!(t_start < t_end)) throw ConfigError("TimeGrid: t_start must be < t_end");
        if (n_steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return (t_end - t_start) / n_steps; }
    double node(int i) const { return t_start + i * dt(); }
    Eigen::ArrayXd nodes() const {
        return Eigen::ArrayXd::LinSpaced(n_steps + 1, t_start, t_end);
    }
};

/// One Brownian realization on a uniform grid. values[0] == 0. Refining by
/// any factor and restricting back to the original grid reproduces the
/// original values bit for bit; all randomness is addressed by
/// (seed, stream, index) through the counter RNG.
struct BrownianPath {
    TimeGrid grid;
    Eigen::ArrayXd values;  // size n_steps + 1
    std::uint64_t seed = 0;

    double value(int i) const { return values[i]; }
    /// B at an arbitrary time via linear interpolation between nodes.
    double value_at(double t) const;
    /// Increment B_{t_{i+1}} - B_{t_i}.
    double increment(int i) const { return values[i + 1] - values[i]; }
};

BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed);

/// Brownian-bridge refinement by an integer factor >= 2. The inserted points
/// are seeded from (seed, interval index), so refining the same path twice
/// yields identical results and the coarse nodes are untouched.
BrownianPath refine(const BrownianPath& path, int factor);

/// Left-point Riemann-Ito sum  sum_i X_{t_i} (B_{t_{i+1}} - B_{t_i}).
double ito_integral(const Eigen::ArrayXd& integrand, const BrownianPath& path);

/// Midpoint-average sum  sum_i (X_{t_i} + X_{t_{i+1}})/2 (B_{t_{i+1}} - B_{t_i}).
double stratonovich_integral(const Eigen::ArrayXd& integrand, const BrownianPath& path);

/// sum_i (X_{t_{i+1}} - X_{t_i})(Y_{t_{i+1}} - Y_{t_i}).
double quadratic_covariation(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

/// Writes (t, B_t) rows, header included, 17 significant digits.
void write_path_csv(const BrownianPath& path, const std::string& filename);

}  // namespace rnlab
