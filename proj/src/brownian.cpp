#include "rnlab/brownian.hpp"

#include <cmath>
#include <fstream>

#include "rnlab/io.hpp"
#include "rnlab/rng.hpp"

namespace rnlab {

namespace {
constexpr std::uint64_t kIncrementStream = 0x696e6372ULL;  // "incr"
constexpr std::uint64_t kBridgeStream = 0x62726467ULL;     // "brdg"
}  // namespace

double BrownianPath::value_at(double t) const {
    const double dt = grid.dt();
    if (t <= grid.t_start) return values[0];
    if (t >= grid.t_end) return values[grid.n_steps];
    double s = (t - grid.t_start) / dt;
    int i = static_cast<int>(s);
    if (i >= grid.n_steps) i = grid.n_steps - 1;
    double w = s - i;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed) {
    BrownianPath path;
    path.grid = grid;
    path.seed = seed;
    path.values.resize(grid.n_steps + 1);
    path.values[0] = 0.0;
    const double sqrt_dt = std::sqrt(grid.dt());
    double b = 0.0;
    for (int i = 0; i < grid.n_steps; ++i) {
        b += sqrt_dt * rng::normal(seed, kIncrementStream, static_cast<std::uint64_t>(i));
        path.values[i + 1] = b;
    }
    return path;
}

BrownianPath refine(const BrownianPath& path, int factor) {
    if (factor < 2) throw ConfigError("refine: factor must be >= 2");
    const int n = path.grid.n_steps;
    BrownianPath out;
    out.grid = TimeGrid(path.grid.t_start, path.grid.t_end, n * factor);
    out.seed = path.seed;
    out.values.resize(n * factor + 1);

    // Bridge draws are addressed by (coarse level, interval, sub-index) so
    // that a given refinement call is reproducible and never perturbs the
    // coarse nodes.
    const std::uint64_t stream =
        rng::splitmix64(kBridgeStream ^ (static_cast<std::uint64_t>(n) << 20) ^
                        static_cast<std::uint64_t>(factor));
    const double dt_fine = out.grid.dt();
    for (int i = 0; i < n; ++i) {
        const double right_val = path.values[i + 1];
        double x = path.values[i];
        out.values[i * factor] = x;
        double remaining = factor * dt_fine;  // time to the right endpoint
        for (int j = 1; j < factor; ++j) {
            const double mean = x + (right_val - x) * dt_fine / remaining;
            const double var = dt_fine * (remaining - dt_fine) / remaining;
            const std::uint64_t idx =
                static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(factor) +
                static_cast<std::uint64_t>(j);
            x = mean + std::sqrt(var) * rng::normal(out.seed, stream, idx);
            out.values[i * factor + j] = x;
            remaining -= dt_fine;
        }
    }
    out.values[n * factor] = path.values[n];
    return out;
}

namespace {
void check_same_length(const Eigen::ArrayXd& integrand, const BrownianPath& path) {
    if (integrand.size() != path.values.size())
        throw GridMismatch("integrand sampled on a different grid than the path");
}
}  // namespace

double ito_integral(const Eigen::ArrayXd& integrand, const BrownianPath& path) {
    check_same_length(integrand, path);
    const int n = path.grid.n_steps;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += integrand[i] * path.increment(i);
    return sum;
}

double stratonovich_integral(const Eigen::ArrayXd& integrand, const BrownianPath& path) {
    check_same_length(integrand, path);
    const int n = path.grid.n_steps;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += 0.5 * (integrand[i] + integrand[i + 1]) * path.increment(i);
    return sum;
}

double quadratic_covariation(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    if (x.size() != y.size()) throw GridMismatch("covariation: sample lengths differ");
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
        sum += (x[i + 1] - x[i]) * (y[i + 1] - y[i]);
    return sum;
}

void write_path_csv(const BrownianPath& path, const std::string& filename) {
    std::ofstream out(filename);
    out << "t,B\n";
    for (int i = 0; i <= path.grid.n_steps; ++i)
        out << io::fmt(path.grid.node(i)) << ',' << io::fmt(path.values[i]) << '\n';
}

}  // namespace rnlab
