#include "rnlab/estimates.hpp"

#include <cmath>
#include <thread>

#include "rnlab/flow.hpp"
#include "rnlab/io.hpp"
#include "rnlab/mollify.hpp"
#include "rnlab/rng.hpp"

namespace rnlab {

MomentEstimate estimate_inverse_jacobian_moment(const DriftField& drift, double s,
                                                double t, double x, int n_samples,
                                                double dt, const MomentOptions& options) {
    if (n_samples < 100)
        throw ConfigError("estimate_inverse_jacobian_moment: need n_samples >= 100");
    if (!drift.deriv)
        throw MissingData("estimate_inverse_jacobian_moment: drift has no derivative");

    const int n_steps = std::max(1, static_cast<int>(std::lround((t - s) / dt)));
    Eigen::ArrayXd inv_j(n_samples);
    std::vector<char> bad(n_samples, 0);
    Eigen::ArrayXd x0(1);
    x0[0] = x;

    auto worker = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            const std::uint64_t seed = rng::mix(options.master_seed, 0x696e766aULL, i);
            const BrownianPath path = sample_path(TimeGrid(s, t, n_steps), seed);
            const FlowSolution sol = solve_forward(drift, path, s, x0);
            const Eigen::MatrixXd jac = jacobian_variational(sol, drift);
            const double j = jac(n_steps, 0);
            if (!(j > 0.0)) bad[i] = 1;
            inv_j[i] = 1.0 / j;
        }
    };
    const int nth = std::max(1, options.n_threads);
    if (nth == 1) {
        worker(0, n_samples);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_samples + nth - 1) / nth;
        for (int th = 0; th < nth; ++th) {
            const int lo = th * chunk;
            const int hi = std::min(n_samples, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    MomentEstimate est;
    est.n_samples = n_samples;
    // serial reduction in seed order: identical for any thread count
    double sum = 0.0;
    for (int i = 0; i < n_samples; ++i) sum += inv_j[i];
    est.mean = sum / n_samples;
    double ss = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double d = inv_j[i] - est.mean;
        ss += d * d;
    }
    est.std_error = std::sqrt(ss / (n_samples - 1.0)) / std::sqrt(double(n_samples));
    for (int i = 0; i < n_samples; ++i)
        if (bad[i]) est.any_nonpositive_jacobian = true;

    std::vector<BrownianPath> omegas;
    for (int i = 0; i < options.norm_omega_samples; ++i)
        omegas.push_back(sample_path(TimeGrid(s, t, 64),
                                     rng::mix(options.master_seed, 0x6e6f726dULL, i)));
    est.bound_components = check_hypothesis(drift, omegas, options.domain_half_width,
                                            options.norm_grid_points);
    return est;
}

std::vector<L2BoundRow> l2_bound_check(const DriftField& drift, const SpatialFn& u0,
                                       const std::vector<double>& eps_list,
                                       const L2BoundOptions& options) {
    std::vector<L2BoundRow> table;
    const int nx = static_cast<int>(std::lround(2.0 * options.L / options.dx)) + 1;
    const Eigen::ArrayXd grid_x =
        Eigen::ArrayXd::LinSpaced(nx, -options.L, options.L);

    for (double eps : eps_list) {
        const MollifiedDrift beps = mollify(drift, eps);
        const DriftField beps_field = beps.as_field();
        const SpatialFn u0eps = mollify_initial(u0, eps);
        Eigen::ArrayXd u0_sq(nx);
        for (int j = 0; j < nx; ++j) {
            const double v = u0eps(grid_x[j]);
            u0_sq[j] = v * v;
        }
        const double rhs0 = io::trapz(u0_sq, options.dx);

        const double dt = std::min(eps * eps / 4.0, options.dt_cap);
        const int n_steps = std::max(1, static_cast<int>(std::lround(options.T / dt)));
        SolveOptions sopt;
        sopt.out_times = options.probe_times;
        sopt.mass_rel_tol = 1.0;  // boundedness study, not a conservation gate

        std::vector<Eigen::ArrayXd> acc(options.probe_times.size(),
                                        Eigen::ArrayXd::Zero(nx));
        for (int p = 0; p < options.n_paths; ++p) {
            const BrownianPath path =
                sample_path(TimeGrid(0.0, options.T, n_steps),
                            rng::mix(options.master_seed, 0x6c32ULL, p));
            const DensityField u =
                solve_by_characteristics(beps_field, u0eps, path, grid_x, sopt);
            for (int k = 0; k < u.n_out(); ++k)
                acc[k] += u.values.row(k).transpose().array().square();
        }
        for (std::size_t k = 0; k < options.probe_times.size(); ++k) {
            const double lhs = io::trapz((acc[k] / options.n_paths).eval(), options.dx);
            table.push_back({eps, options.probe_times[k], lhs, rhs0,
                             (rhs0 > 0.0) ? lhs / rhs0 : 0.0});
        }
    }
    return table;
}

CommutatorRecord commutator(const std::vector<CommutatorSample>& samples,
                            const DriftField& drift, const Eigen::ArrayXd& z_grid,
                            double eps) {
    const double dz = z_grid[1] - z_grid[0];
    if (dz > eps / 8.0 + 1e-15)
        throw ConfigError("commutator: grid under-resolved, need dz <= eps/8");
    const int nz = static_cast<int>(z_grid.size());

    double total = 0.0;
    for (const auto& sample : samples) {
        const int nt = static_cast<int>(sample.times.size());
        Eigen::ArrayXd sq_in_time(nt);
        for (int k = 0; k < nt; ++k) {
            const double t = sample.times[k];
            Eigen::ArrayXd b_vals(nz);
            for (int j = 0; j < nz; ++j)
                b_vals[j] = drift.eval(t, z_grid[j], sample.path);
            const Eigen::ArrayXd u_row = sample.u_slices.row(k).transpose().array();
            const Eigen::ArrayXd b_eps = convolve_grid(b_vals, dz, eps);
            const Eigen::ArrayXd u_eps = convolve_grid(u_row, dz, eps);
            const Eigen::ArrayXd bu_eps = convolve_grid((b_vals * u_row).eval(), dz, eps);
            const Eigen::ArrayXd r = b_eps * u_eps - bu_eps;
            sq_in_time[k] = io::trapz(r.square().eval(), dz);
        }
        // trapezoid in t over the recorded slices
        double tint = 0.0;
        for (int k = 0; k + 1 < nt; ++k)
            tint += 0.5 * (sample.times[k + 1] - sample.times[k]) *
                    (sq_in_time[k] + sq_in_time[k + 1]);
        if (nt == 1) tint = sq_in_time[0];
        total += tint;
    }
    CommutatorRecord rec;
    rec.eps = eps;
    rec.l2_norm = std::sqrt(total / std::max<std::size_t>(samples.size(), 1));
    return rec;
}

std::vector<CommutatorRecord> commutator_decay_study(
    const std::vector<CommutatorSample>& samples, const DriftField& drift,
    const Eigen::ArrayXd& z_grid, const std::vector<double>& eps_list) {
    std::vector<CommutatorRecord> records;
    records.reserve(eps_list.size());
    for (double eps : eps_list)
        records.push_back(commutator(samples, drift, z_grid, eps));
    return records;
}

}  // namespace rnlab
