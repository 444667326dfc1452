#include "rnlab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rnlab/io.hpp"
#include "rnlab/rng.hpp"

namespace rnlab {

namespace {

double bump_raw(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

double bump_raw_d1(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    const double d = 1.0 - y * y;
    return bump_raw(y) * (-2.0 * y / (d * d));
}

double bump_raw_d2(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    const double d = 1.0 - y * y;
    const double p1 = -2.0 * y / (d * d);
    const double p2 = -2.0 * (1.0 + 3.0 * y * y) / (d * d * d);
    return bump_raw(y) * (p2 + p1 * p1);
}

// Node indices (into the path grid) at which to record the density.
std::vector<int> output_indices(const BrownianPath& path,
                                const std::vector<double>& wanted) {
    std::vector<int> idx;
    if (wanted.empty()) {
        idx.resize(path.grid.n_steps + 1);
        for (int k = 0; k <= path.grid.n_steps; ++k) idx[k] = k;
        return idx;
    }
    const double dt = path.grid.dt();
    for (double t : wanted) {
        const double s = (t - path.grid.t_start) / dt;
        const int k = static_cast<int>(std::lround(s));
        if (k < 0 || k > path.grid.n_steps || std::abs(s - k) > 1e-9)
            throw ConfigError("output time is not a path grid node");
        idx.push_back(k);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

double interp(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys, double x,
              Eigen::Index i) {
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - w) * ys[i] + w * ys[i + 1];
}

}  // namespace

TestFunction test_bump(double center, double width, double amplitude) {
    TestFunction phi;
    phi.support_lo = center - width;
    phi.support_hi = center + width;
    phi.phi = [=](double x) { return amplitude * bump_raw((x - center) / width); };
    phi.phi_prime = [=](double x) {
        return amplitude * bump_raw_d1((x - center) / width) / width;
    };
    phi.phi_dprime = [=](double x) {
        return amplitude * bump_raw_d2((x - center) / width) / (width * width);
    };
    return phi;
}

DensityField solve_by_characteristics(const DriftField& drift, const SpatialFn& u0,
                                      const BrownianPath& path,
                                      const Eigen::ArrayXd& grid_x,
                                      const SolveOptions& options) {
    if (!drift.deriv)
        throw MissingData("solve_by_characteristics: drift must provide a derivative");
    const int nq = static_cast<int>(grid_x.size());
    const double dx = grid_x[1] - grid_x[0];
    const double dt = path.grid.dt();
    const int n_steps = path.grid.n_steps;

    // Widen the initial grid so every query stays inside the monotone table.
    double margin = options.margin;
    if (margin <= 0.0) {
        double sup_b = 0.0;
        for (int j = 0; j < nq; ++j)
            sup_b = std::max(sup_b, std::abs(drift.eval(path.grid.t_start, grid_x[j], path)));
        const double max_b_path = path.values.abs().maxCoeff();
        margin = max_b_path + sup_b * (path.grid.t_end - path.grid.t_start) + 1.0;
    }
    const int pad = static_cast<int>(std::ceil(margin / dx)) + 1;
    const int ni = nq + 2 * pad;
    Eigen::ArrayXd init(ni);
    for (int i = 0; i < ni; ++i) init[i] = grid_x[0] + (i - pad) * dx;

    DensityField u;
    u.grid_x = grid_x;
    u.path = path;
    const std::vector<int> rec = output_indices(path, options.out_times);
    u.values.resize(static_cast<int>(rec.size()), nq);
    u.out_times.reserve(rec.size());
    for (int k : rec) u.out_times.push_back(path.grid.node(k));
    u.mass_times = path.grid.nodes();
    u.mass.resize(n_steps + 1);

    Eigen::ArrayXd x_now = init;
    Eigen::ArrayXd log_j = Eigen::ArrayXd::Zero(ni);
    Eigen::ArrayXd bp_now(ni);
    for (int i = 0; i < ni; ++i)
        bp_now[i] = drift.deriv(path.grid.t_start, init[i], path);

    std::size_t rec_pos = 0;
    double mass0 = 0.0;
    Eigen::ArrayXd row(nq);
    for (int k = 0; k <= n_steps; ++k) {
        // density on the query grid by a sorted merge against the monotone table
        Eigen::Index i = 0;
        for (int j = 0; j < nq; ++j) {
            const double x = grid_x[j];
            if (x < x_now[0] || x > x_now[ni - 1]) {
                row[j] = 0.0;
                continue;
            }
            while (i + 2 < ni && x_now[i + 1] <= x) ++i;
            const double psi = interp(x_now, init, x, i);
            const double lj = interp(x_now, log_j, x, i);
            row[j] = u0(psi) * std::exp(-lj);
        }
        u.mass[k] = io::trapz(row, dx);
        if (k == 0) mass0 = u.mass[k];
        if (std::abs(u.mass[k] - mass0) > options.mass_rel_tol * std::max(std::abs(mass0), 1e-12))
            throw MassDriftExceeded("solve_by_characteristics: mass drift exceeds tolerance");
        if (rec_pos < rec.size() && rec[rec_pos] == k) {
            u.values.row(static_cast<int>(rec_pos)) = row.transpose();
            ++rec_pos;
        }
        if (k == n_steps) break;

        const double t = path.grid.node(k);
        const double t1 = path.grid.node(k + 1);
        const double db = path.increment(k);
        double prev = -1e300;
        for (int ii = 0; ii < ni; ++ii) {
            const double x = x_now[ii];
            x_now[ii] = x + drift.eval(t, x, path) * dt + db;
            if (!std::isfinite(x_now[ii]))
                throw NonFiniteState("solve_by_characteristics: non-finite state");
            if (!(x_now[ii] > prev))
                throw MonotonicityViolation("solve_by_characteristics: trajectories crossed");
            prev = x_now[ii];
        }
        for (int ii = 0; ii < ni; ++ii) {
            const double bp_next = drift.deriv(t1, x_now[ii], path);
            log_j[ii] += 0.5 * dt * (bp_now[ii] + bp_next);
            bp_now[ii] = bp_next;
        }
    }
    return u;
}

DensityField pushforward_particles(const DriftField& drift, const SpatialFn& u0,
                                   const BrownianPath& path,
                                   const Eigen::ArrayXd& grid_x, int n_particles,
                                   const ParticleOptions& options) {
    const int nq = static_cast<int>(grid_x.size());
    const double dx = grid_x[1] - grid_x[0];

    Eigen::ArrayXd u0_vals(nq);
    for (int j = 0; j < nq; ++j) {
        u0_vals[j] = u0(grid_x[j]);
        if (!std::isfinite(u0_vals[j]) || u0_vals[j] < -1e-12)
            throw ConfigError("pushforward_particles: u0 must be nonnegative and finite");
        u0_vals[j] = std::max(u0_vals[j], 0.0);
    }
    const Eigen::ArrayXd cdf = io::cumtrapz(u0_vals, dx);
    const double mass = cdf[nq - 1];
    if (!(mass > 0.0))
        throw ConfigError("pushforward_particles: u0 is not normalizable");

    // inverse-CDF sampling with counter-addressed uniforms
    Eigen::ArrayXd particles(n_particles);
    const std::uint64_t seed = path.seed ^ (0x70617274ULL + options.seed_offset);
    for (int p = 0; p < n_particles; ++p) {
        const double target = mass * rng::uniform01(rng::mix(seed, 0x756e6966ULL, p));
        Eigen::Index lo = 0, hi = nq - 1;
        while (hi - lo > 1) {
            const Eigen::Index mid = (lo + hi) / 2;
            if (cdf[mid] <= target)
                lo = mid;
            else
                hi = mid;
        }
        const double span = cdf[hi] - cdf[lo];
        const double w = (span > 0.0) ? (target - cdf[lo]) / span : 0.0;
        particles[p] = (1.0 - w) * grid_x[lo] + w * grid_x[hi];
    }

    double bw = options.bandwidth;
    if (bw <= 0.0) {
        const double mean = particles.mean();
        const double sd = std::sqrt((particles - mean).square().mean());
        bw = std::pow(static_cast<double>(n_particles), -0.2) * std::max(sd, 1e-6);
    }

    DensityField u;
    u.grid_x = grid_x;
    u.path = path;
    const std::vector<int> rec = output_indices(path, options.out_times);
    u.values.resize(static_cast<int>(rec.size()), nq);
    u.out_times.reserve(rec.size());
    for (int k : rec) u.out_times.push_back(path.grid.node(k));
    u.mass_times.resize(rec.size());
    u.mass.resize(rec.size());

    const double dt = path.grid.dt();
    const double norm = mass / (n_particles * bw * std::sqrt(2.0 * M_PI));
    std::size_t rec_pos = 0;
    for (int k = 0; k <= path.grid.n_steps; ++k) {
        if (rec_pos < rec.size() && rec[rec_pos] == k) {
            Eigen::ArrayXd row = Eigen::ArrayXd::Zero(nq);
            for (int p = 0; p < n_particles; ++p) {
                const double xp = particles[p];
                const int j_lo =
                    std::max(0, static_cast<int>((xp - 6.0 * bw - grid_x[0]) / dx));
                const int j_hi =
                    std::min(nq - 1, static_cast<int>((xp + 6.0 * bw - grid_x[0]) / dx) + 1);
                for (int j = j_lo; j <= j_hi; ++j) {
                    const double z = (grid_x[j] - xp) / bw;
                    row[j] += std::exp(-0.5 * z * z);
                }
            }
            row *= norm;
            u.values.row(static_cast<int>(rec_pos)) = row.transpose();
            u.mass_times[static_cast<Eigen::Index>(rec_pos)] = path.grid.node(k);
            u.mass[static_cast<Eigen::Index>(rec_pos)] = io::trapz(row, dx);
            ++rec_pos;
        }
        if (k == path.grid.n_steps) break;
        const double t = path.grid.node(k);
        const double db = path.increment(k);
        for (int p = 0; p < n_particles; ++p)
            particles[p] += drift.eval(t, particles[p], path) * dt + db;
    }
    return u;
}

Eigen::ArrayXd weak_residual(const DensityField& u, const DriftField& drift,
                             const BrownianPath& path, const TestFunction& phi) {
    const int nq = static_cast<int>(u.grid_x.size());
    const double dx = u.dx();
    if (phi.support_lo < u.grid_x[0] || phi.support_hi > u.grid_x[nq - 1])
        throw ConfigError("weak_residual: test function support leaves the domain");
    const double dt = path.grid.dt();
    const int n_rec = u.n_out();
    // the density must be recorded at consecutive path nodes starting at t_start
    for (int k = 0; k < n_rec; ++k) {
        const double expect = path.grid.node(k);
        if (std::abs(u.out_times[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
            throw ConfigError("weak_residual: density must be recorded at every node");
    }

    Eigen::ArrayXd phi_v(nq), phi_p(nq), phi_pp(nq);
    for (int j = 0; j < nq; ++j) {
        phi_v[j] = phi.phi(u.grid_x[j]);
        phi_p[j] = phi.phi_prime(u.grid_x[j]);
        phi_pp[j] = phi.phi_dprime(u.grid_x[j]);
    }

    Eigen::ArrayXd residual(n_rec);
    double drift_term = 0.0, noise_term = 0.0, correction = 0.0;
    double lhs0 = 0.0;
    for (int k = 0; k < n_rec; ++k) {
        const Eigen::ArrayXd row = u.values.row(k).transpose().array();
        const double lhs = io::trapz((row * phi_v).eval(), dx);
        if (k == 0) lhs0 = lhs;
        residual[k] = lhs - lhs0 - drift_term - noise_term - correction;
        if (k == n_rec - 1) break;
        const double t = path.grid.node(k);
        Eigen::ArrayXd b_row(nq);
        for (int j = 0; j < nq; ++j) b_row[j] = drift.eval(t, u.grid_x[j], path);
        drift_term += dt * io::trapz((row * b_row * phi_p).eval(), dx);
        noise_term += path.increment(k) * io::trapz((row * phi_p).eval(), dx);
        correction += 0.5 * dt * io::trapz((row * phi_pp).eval(), dx);
    }
    return residual;
}

PrimitiveField primitive_field(const DensityField& u) {
    PrimitiveField v;
    v.grid_x = u.grid_x;
    v.out_times = u.out_times;
    v.values.resize(u.values.rows(), u.values.cols());
    for (int k = 0; k < u.values.rows(); ++k)
        v.values.row(k) =
            io::cumtrapz(u.values.row(k).transpose().array(), u.dx()).transpose();
    return v;
}

void write_density_csv(const DensityField& u, const std::string& filename) {
    std::ofstream out(filename);
    out << "t,x,u\n";
    for (int k = 0; k < u.n_out(); ++k)
        for (Eigen::Index j = 0; j < u.grid_x.size(); ++j)
            out << io::fmt(u.out_times[k]) << ',' << io::fmt(u.grid_x[j]) << ','
                << io::fmt(u.values(k, j)) << '\n';
}

void write_density_binary(const DensityField& u, const std::string& filename) {
    io::write_binary_table(filename, u.values);
}

}  // namespace rnlab
