#pragma once

#include <Eigen/Dense>
#include <string>

#include "rnlab/brownian.hpp"
#include "rnlab/drift.hpp"

namespace rnlab {

/// Euler-Maruyama trajectories X_{s,t}(x_j) on a grid of initial points,
/// monotone in x at every recorded time, with the variational Jacobian
/// exp(int b'(X) du) alongside.
struct FlowSolution {
    double s = 0.0;
    Eigen::ArrayXd grid_x;       // strictly increasing initial points
    TimeGrid times;              // [s, T] at the path resolution
    Eigen::MatrixXd trajectories;  // (n_times+1) x n_x
    Eigen::MatrixXd jacobians;     // same shape; empty if drift has no derivative
    BrownianPath path;

    int n_times() const { return times.n_steps; }
    int n_points() const { return static_cast<int>(grid_x.size()); }
};

struct BackwardFlow {
    double t = 0.0;
    Eigen::ArrayXd grid_y;
    TimeGrid times;              // [0, t]
    Eigen::MatrixXd trajectories;  // row k holds Y_{s_k, t}(y_j)
    BrownianPath path;
};

FlowSolution solve_forward(const DriftField& drift, const BrownianPath& path,
                           double s, const Eigen::ArrayXd& grid_x);

BackwardFlow solve_backward(const DriftField& drift, const BrownianPath& path,
                            double t, const Eigen::ArrayXd& grid_y);

/// J(s,t,x_j) = exp(trapezoid of b'(u, X_u) over [s,t]); requires an analytic
/// drift derivative.
Eigen::MatrixXd jacobian_variational(const FlowSolution& solution, const DriftField& drift);

struct IwkJacobians {
    Eigen::MatrixXd jacobians;
    /// RMS of |J_iwk/J_var - 1| over recorded times t > s and grid points;
    /// NaN when the drift has no derivative to compare against.
    double rms_relative_residual = 0.0;
};

/// Jacobian through the Ito-Wentzell-Kunita identity: solves
///   int_s^t b'(X) du = 2 [ b~(t,X_t) - b~(s,x) - int f~ du - int g~ dB
///                          - int b^2 du - int g du - int b dB ]
/// with trapezoid du-quadratures and left-point dB sums.
IwkJacobians jacobian_iwk(const FlowSolution& solution, const DriftField& drift,
                          const PrimitiveTriple& primitives);

/// Monotone table inverse psi_t: binary search plus linear interpolation on
/// {(X(s,t,x_j), x_j)}; exact at nodes.
struct MonotoneInterpolant {
    Eigen::ArrayXd xs;  // monotone values X(s,t,x_j)
    Eigen::ArrayXd ys;  // initial points x_j

    double operator()(double x) const;        // throws QueryOutsideRange
    bool in_range(double x) const { return x >= xs[0] && x <= xs[xs.size() - 1]; }
};

MonotoneInterpolant invert_flow(const FlowSolution& solution, int time_index);

/// exp(int h dB - 1/2 int h^2 du) with the left-point Ito sum and trapezoid
/// time quadrature.
double exponential_martingale(const Eigen::ArrayXd& integrand, const BrownianPath& path);

void write_flow_csv(const FlowSolution& solution, const std::string& filename);

}  // namespace rnlab
