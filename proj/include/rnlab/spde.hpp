#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rnlab/drift.hpp"
#include "rnlab/flow.hpp"

namespace rnlab {

/// The transported density u(t,x) on a space-time grid, recorded at selected
/// output times; mass is tracked at every integration step.
struct DensityField {
    Eigen::ArrayXd grid_x;
    std::vector<double> out_times;    // subset of path nodes, ascending
    Eigen::MatrixXd values;           // n_out x n_x
    Eigen::ArrayXd mass_times;        // every integration node
    Eigen::ArrayXd mass;              // trapezoid mass at each node
    BrownianPath path;
    double epsilon = 0.0;

    double dx() const { return grid_x[1] - grid_x[0]; }
    int n_out() const { return static_cast<int>(out_times.size()); }
};

struct PrimitiveField {
    Eigen::ArrayXd grid_x;
    std::vector<double> out_times;
    Eigen::MatrixXd values;  // V(t_i, x_j) = int_{-L}^{x_j} u
};

/// Smooth compactly supported test function with analytic derivatives.
struct TestFunction {
    SpatialFn phi, phi_prime, phi_dprime;
    double support_lo = 0.0, support_hi = 0.0;
};

/// Scaled bump amplitude * exp(1 - 1/(1-y^2)), y = (x-center)/width.
TestFunction test_bump(double center, double width, double amplitude = 1.0);

struct SolveOptions {
    std::vector<double> out_times;    // empty: every integration node
    double mass_rel_tol = 0.05;       // MassDriftExceeded threshold
    double margin = 0.0;              // extra half-width for the initial grid;
                                      // 0 picks max|B| + sup-drift sweep + 1
};

/// u(t,x) = u0(psi_t(x)) / J(psi_t(x)): streams the forward flow from a
/// widened initial grid, inverts the monotone table by a sorted merge, and
/// records the trapezoid mass at every step.
DensityField solve_by_characteristics(const DriftField& drift, const SpatialFn& u0,
                                      const BrownianPath& path,
                                      const Eigen::ArrayXd& grid_x,
                                      const SolveOptions& options = {});

struct ParticleOptions {
    std::vector<double> out_times;
    double bandwidth = 0.0;           // 0: n^{-1/5} * sample std at t=0
    std::uint64_t seed_offset = 1;
};

/// Independent second solver: samples particles from u0/mass, advects them
/// with the forward Euler kernel, and returns a Gaussian KDE scaled by mass.
DensityField pushforward_particles(const DriftField& drift, const SpatialFn& u0,
                                   const BrownianPath& path,
                                   const Eigen::ArrayXd& grid_x, int n_particles,
                                   const ParticleOptions& options = {});

/// residual(t) = int u(t) phi - int u0 phi - sum_s [int u b phi' dx] ds
///             - sum_s [int u phi' dx] dB - 1/2 sum_s [int u phi'' dx] ds
/// with trapezoid space integrals and left-point time sums. Requires the
/// density to be recorded at every node of [0, t].
Eigen::ArrayXd weak_residual(const DensityField& u, const DriftField& drift,
                             const BrownianPath& path, const TestFunction& phi);

PrimitiveField primitive_field(const DensityField& u);

void write_density_csv(const DensityField& u, const std::string& filename);
void write_density_binary(const DensityField& u, const std::string& filename);

}  // namespace rnlab
