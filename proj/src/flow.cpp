#include "rnlab/flow.hpp"

#include <cmath>
#include <fstream>

#include "rnlab/io.hpp"

namespace rnlab {

namespace {

int node_index(const TimeGrid& grid, double t, const char* what) {
    const double s = (t - grid.t_start) / grid.dt();
    const int i = static_cast<int>(std::lround(s));
    if (i < 0 || i > grid.n_steps || std::abs(s - i) > 1e-9)
        throw ConfigError(std::string(what) + ": time is not a path grid node");
    return i;
}

void check_row(const Eigen::MatrixXd& traj, int row, const char* what) {
    for (int j = 0; j < traj.cols(); ++j) {
        if (!std::isfinite(traj(row, j)))
            throw NonFiniteState(std::string(what) + ": non-finite trajectory value");
        if (j > 0 && !(traj(row, j) > traj(row, j - 1)))
            throw MonotonicityViolation(
                std::string(what) +
                ": trajectories crossed (dt too large for the drift's Lipschitz constant)");
    }
}

}  // namespace

FlowSolution solve_forward(const DriftField& drift, const BrownianPath& path,
                           double s, const Eigen::ArrayXd& grid_x) {
    for (Eigen::Index j = 1; j < grid_x.size(); ++j)
        if (!(grid_x[j] > grid_x[j - 1]))
            throw ConfigError("solve_forward: grid_x must be strictly increasing");
    const int ks = node_index(path.grid, s, "solve_forward");
    const int n = path.grid.n_steps - ks;
    if (n < 1) throw ConfigError("solve_forward: s must lie before t_end");

    FlowSolution sol;
    sol.s = s;
    sol.grid_x = grid_x;
    sol.times = TimeGrid(s, path.grid.t_end, n);
    sol.path = path;
    const int nx = static_cast<int>(grid_x.size());
    sol.trajectories.resize(n + 1, nx);
    sol.trajectories.row(0) = grid_x.transpose();
    const double dt = path.grid.dt();
    for (int k = 0; k < n; ++k) {
        const double t = path.grid.node(ks + k);
        const double db = path.increment(ks + k);
        for (int j = 0; j < nx; ++j) {
            const double x = sol.trajectories(k, j);
            sol.trajectories(k + 1, j) = x + drift.eval(t, x, path) * dt + db;
        }
        check_row(sol.trajectories, k + 1, "solve_forward");
    }
    return sol;
}

BackwardFlow solve_backward(const DriftField& drift, const BrownianPath& path,
                            double t, const Eigen::ArrayXd& grid_y) {
    const int kt = node_index(path.grid, t, "solve_backward");
    if (kt < 1) throw ConfigError("solve_backward: t must lie after t_start");
    BackwardFlow flow;
    flow.t = t;
    flow.grid_y = grid_y;
    flow.times = TimeGrid(path.grid.t_start, t, kt);
    flow.path = path;
    const int ny = static_cast<int>(grid_y.size());
    flow.trajectories.resize(kt + 1, ny);
    flow.trajectories.row(kt) = grid_y.transpose();
    const double dt = path.grid.dt();
    for (int k = kt; k > 0; --k) {
        const double tk = path.grid.node(k);
        const double db = path.increment(k - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = flow.trajectories(k, j);
            flow.trajectories(k - 1, j) = y - drift.eval(tk, y, path) * dt - db;
        }
        check_row(flow.trajectories, k - 1, "solve_backward");
    }
    return flow;
}

Eigen::MatrixXd jacobian_variational(const FlowSolution& solution, const DriftField& drift) {
    if (!drift.deriv)
        throw MissingData("jacobian_variational: drift has no analytic derivative");
    const int n = solution.n_times();
    const int nx = solution.n_points();
    const double dt = solution.times.dt();
    Eigen::MatrixXd log_j = Eigen::MatrixXd::Zero(n + 1, nx);
    Eigen::ArrayXd prev(nx), curr(nx);
    for (int j = 0; j < nx; ++j)
        prev[j] = drift.deriv(solution.times.node(0), solution.trajectories(0, j),
                              solution.path);
    for (int k = 0; k < n; ++k) {
        const double t1 = solution.times.node(k + 1);
        for (int j = 0; j < nx; ++j)
            curr[j] = drift.deriv(t1, solution.trajectories(k + 1, j), solution.path);
        for (int j = 0; j < nx; ++j)
            log_j(k + 1, j) = log_j(k, j) + 0.5 * dt * (prev[j] + curr[j]);
        prev = curr;
    }
    return log_j.array().exp().matrix();
}

IwkJacobians jacobian_iwk(const FlowSolution& solution, const DriftField& drift,
                          const PrimitiveTriple& primitives) {
    if (!primitives.b_tilde)
        throw MissingData("jacobian_iwk: primitive b~ missing");
    const bool random_part = drift.semimartingale_f || drift.semimartingale_g;
    if (random_part && (!primitives.f_tilde || !primitives.g_tilde))
        throw MissingData("jacobian_iwk: semimartingale drift requires f~ and g~");

    const int n = solution.n_times();
    const int nx = solution.n_points();
    const double dt = solution.times.dt();
    const BrownianPath& w = solution.path;
    const int ks = node_index(w.grid, solution.s, "jacobian_iwk");

    IwkJacobians out;
    out.jacobians.resize(n + 1, nx);
    out.jacobians.row(0).setOnes();

    Eigen::MatrixXd var;
    if (drift.deriv) var = jacobian_variational(solution, drift);

    double res_sq = 0.0;
    int res_n = 0;
    for (int j = 0; j < nx; ++j) {
        const double x0 = solution.grid_x[j];
        const double b_tilde0 = primitives.b_tilde(solution.s, x0, w);
        double du_terms = 0.0;  // trapezoid accumulators: f~ + b^2 + g
        double db_terms = 0.0;  // left-point accumulators: g~ + b
        auto du_integrand = [&](int k) {
            const double t = solution.times.node(k);
            const double x = solution.trajectories(k, j);
            double v = drift.eval(t, x, w);
            v = v * v;
            if (primitives.f_tilde) v += primitives.f_tilde(t, x, w);
            if (drift.semimartingale_g) v += drift.semimartingale_g(t, x, w);
            return v;
        };
        double prev_du = du_integrand(0);
        for (int k = 0; k < n; ++k) {
            const double t = solution.times.node(k);
            const double x = solution.trajectories(k, j);
            const double db = w.increment(ks + k);
            double left = drift.eval(t, x, w);
            if (primitives.g_tilde) left += primitives.g_tilde(t, x, w);
            db_terms += left * db;
            const double next_du = du_integrand(k + 1);
            du_terms += 0.5 * dt * (prev_du + next_du);
            prev_du = next_du;
            const double t1 = solution.times.node(k + 1);
            const double x1 = solution.trajectories(k + 1, j);
            const double log_j =
                2.0 * (primitives.b_tilde(t1, x1, w) - b_tilde0 - du_terms - db_terms);
            out.jacobians(k + 1, j) = std::exp(log_j);
            if (var.size() > 0) {
                const double rel = out.jacobians(k + 1, j) / var(k + 1, j) - 1.0;
                res_sq += rel * rel;
                ++res_n;
            }
        }
    }
    out.rms_relative_residual =
        (res_n > 0) ? std::sqrt(res_sq / res_n) : std::nan("");
    return out;
}

double MonotoneInterpolant::operator()(double x) const {
    const Eigen::Index n = xs.size();
    if (x < xs[0] || x > xs[n - 1])
        throw QueryOutsideRange("invert_flow: query outside the flow's range");
    // binary search for the bracketing interval
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (xs[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    if (x == xs[lo]) return ys[lo];
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return (1.0 - w) * ys[lo] + w * ys[hi];
}

MonotoneInterpolant invert_flow(const FlowSolution& solution, int time_index) {
    if (time_index < 0 || time_index > solution.n_times())
        throw ConfigError("invert_flow: time index out of range");
    MonotoneInterpolant psi;
    psi.xs = solution.trajectories.row(time_index).transpose().array();
    psi.ys = solution.grid_x;
    for (Eigen::Index j = 1; j < psi.xs.size(); ++j)
        if (!(psi.xs[j] > psi.xs[j - 1]))
            throw MonotonicityViolation("invert_flow: table is not strictly increasing");
    return psi;
}

double exponential_martingale(const Eigen::ArrayXd& integrand, const BrownianPath& path) {
    const double stoch = ito_integral(integrand, path);
    const double quad = io::trapz(integrand.square(), path.grid.dt());
    return std::exp(stoch - 0.5 * quad);
}

void write_flow_csv(const FlowSolution& solution, const std::string& filename) {
    std::ofstream out(filename);
    out << "s,t,x,X,J\n";
    Eigen::MatrixXd jac = solution.jacobians;
    const bool has_j = jac.size() > 0;
    for (int k = 0; k <= solution.n_times(); ++k)
        for (int j = 0; j < solution.n_points(); ++j) {
            out << io::fmt(solution.s) << ',' << io::fmt(solution.times.node(k)) << ','
                << io::fmt(solution.grid_x[j]) << ','
                << io::fmt(solution.trajectories(k, j)) << ','
                << (has_j ? io::fmt(jac(k, j)) : std::string("nan")) << '\n';
        }
}

}  // namespace rnlab
