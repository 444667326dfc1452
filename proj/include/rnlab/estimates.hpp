#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rnlab/drift.hpp"
#include "rnlab/spde.hpp"

namespace rnlab {

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n_samples = 0;
    bool any_nonpositive_jacobian = false;
    HypothesisReport bound_components;
};

struct MomentOptions {
    int n_threads = 1;
    std::uint64_t master_seed = 0;
    double domain_half_width = 10.0;  // for the hypothesis norm components
    int norm_grid_points = 2001;
    int norm_omega_samples = 4;
};

/// Seed-averaged E[ |dX/dx|^{-1} ] at (s, t, x) with the variational Jacobian;
/// reduction is in seed order, so thread count never changes the result.
MomentEstimate estimate_inverse_jacobian_moment(const DriftField& drift, double s,
                                                double t, double x, int n_samples,
                                                double dt,
                                                const MomentOptions& options = {});

struct L2BoundRow {
    double eps;
    double t;
    double lhs;    // int E|u^eps(t,x)|^2 dx  (seed average)
    double rhs0;   // int |u0^eps|^2 dx
    double ratio;  // lhs / rhs0
};

struct L2BoundOptions {
    double L = 10.0;
    double T = 1.0;
    double dx = 0.02;
    double dt_cap = 1e-3;            // dt = min(eps^2/4, dt_cap)
    int n_paths = 8;
    std::uint64_t master_seed = 0;
    std::vector<double> probe_times = {0.25, 0.5, 0.75, 1.0};
};

std::vector<L2BoundRow> l2_bound_check(const DriftField& drift, const SpatialFn& u0,
                                       const std::vector<double>& eps_list,
                                       const L2BoundOptions& options = {});

struct CommutatorRecord {
    double eps = 0.0;
    double l2_norm = 0.0;
};

/// One omega sample for the commutator: u = dV/dx on a uniform z-grid at a
/// set of time slices, with the path that produced it.
struct CommutatorSample {
    BrownianPath path;
    std::vector<double> times;
    Eigen::MatrixXd u_slices;  // n_times x n_z
};

/// || b_eps du V_eps - (b du V)_eps ||_{L^2} over (samples x [0,T] x domain)
/// by direct quadrature convolution; requires dz <= eps/8.
CommutatorRecord commutator(const std::vector<CommutatorSample>& samples,
                            const DriftField& drift, const Eigen::ArrayXd& z_grid,
                            double eps);

std::vector<CommutatorRecord> commutator_decay_study(
    const std::vector<CommutatorSample>& samples, const DriftField& drift,
    const Eigen::ArrayXd& z_grid, const std::vector<double>& eps_list);

}  // namespace rnlab
