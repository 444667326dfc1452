#pragma once

#include <Eigen/Dense>

#include "rnlab/drift.hpp"

namespace rnlab {

/// The standard symmetric bump exp(-1/(1-x^2)) on (-1,1), normalized to unit
/// mass, plus the C^2 cutoff eta: 1 on [-1,1], 0 outside [-2,2].
namespace mollifier {

double rho(double x);        // normalized bump
double rho_prime(double x);
double eta(double x);        // quintic C^2 ramp between radius 1 and 2
double eta_prime(double x);

}  // namespace mollifier

/// b^eps(x) = eta_eps(x) (b * rho_eps)(x) with eta_eps(x) = eta(eps x).
/// Convolutions are direct quadrature against the base field; derivatives use
/// the mollifier's derivative, never finite differences. The discrete kernel
/// weights are normalized to unit mass, so sup|b^eps| <= sup|b| holds exactly.
struct MollifiedDrift {
    DriftField base;
    double epsilon;
    int quad_points;  // nodes across the kernel support [-eps, eps]

    double value(double t, double x, const BrownianPath& w) const;
    double derivative(double t, double x, const BrownianPath& w) const;
    /// Wraps the mollified field as a smooth catalog-style DriftField.
    DriftField as_field() const;
};

MollifiedDrift mollify(const DriftField& drift, double epsilon, int quad_points = 65);

/// u0^eps = eta_eps (u0 * rho_eps) for a deterministic spatial function.
SpatialFn mollify_initial(const SpatialFn& u0, double epsilon, int quad_points = 65);

/// Convolution of a grid function with rho_eps on its own uniform grid
/// (zero-extended outside). Requires dz <= eps/8.
Eigen::ArrayXd convolve_grid(const Eigen::ArrayXd& values, double dz, double eps);

/// Samples a time-independent smooth field (value and derivative) on a dense
/// uniform table and evaluates by linear interpolation. Used by the sweep
/// scenarios where the same mollified drift is queried millions of times.
DriftField tabulate_spatial(const DriftField& field, double lo, double hi, int n_nodes);

}  // namespace rnlab
