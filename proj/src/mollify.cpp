#include "rnlab/mollify.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace rnlab {

namespace mollifier {

namespace {

double rho_unnormalized(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

double rho_mass() {
    // One-time Simpson quadrature of the bump on [-1, 1].
    static const double mass = [] {
        const int n = 20000;  // even
        const double h = 2.0 / n;
        double s = rho_unnormalized(-1.0) + rho_unnormalized(1.0);
        for (int i = 1; i < n; ++i)
            s += rho_unnormalized(-1.0 + i * h) * ((i % 2) ? 4.0 : 2.0);
        return s * h / 3.0;
    }();
    return mass;
}

}  // namespace

double rho(double x) { return rho_unnormalized(x) / rho_mass(); }

double rho_prime(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    const double d = 1.0 - x * x;
    return rho_unnormalized(x) * (-2.0 * x / (d * d)) / rho_mass();
}

// Quintic smoothstep ramp: C^2, eta = 1 on [-1,1], 0 outside [-2,2].
double eta(double x) {
    const double a = std::abs(x);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double s = a - 1.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double eta_prime(double x) {
    const double a = std::abs(x);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double s = a - 1.0;
    const double d = -s * s * (30.0 - 60.0 * s + 30.0 * s * s);
    return (x > 0.0) ? d : -d;
}

}  // namespace mollifier

namespace {

struct Kernel {
    Eigen::ArrayXd nodes;       // u in [-1, 1]
    Eigen::ArrayXd weights;     // unit mass
    Eigen::ArrayXd d_weights;   // rho' weights / shared normalization, zero mean
};

Kernel make_kernel(int quad_points) {
    Kernel k;
    const int m = quad_points - 1;
    k.nodes = Eigen::ArrayXd::LinSpaced(quad_points, -1.0, 1.0);
    Eigen::ArrayXd trap = Eigen::ArrayXd::Ones(quad_points);
    trap[0] = trap[m] = 0.5;
    Eigen::ArrayXd w(quad_points), dw(quad_points);
    for (int i = 0; i < quad_points; ++i) {
        w[i] = trap[i] * mollifier::rho(k.nodes[i]);
        dw[i] = trap[i] * mollifier::rho_prime(k.nodes[i]);
    }
    const double z = w.sum();
    k.weights = w / z;
    dw /= z;
    dw -= dw.mean();  // exact zero response to constants
    k.d_weights = dw;
    return k;
}

double conv_value(const Kernel& k, double eps, double x,
                  const std::function<double(double)>& base) {
    double s = 0.0;
    for (int i = 0; i < k.nodes.size(); ++i)
        s += k.weights[i] * base(x - eps * k.nodes[i]);
    return s;
}

double conv_deriv(const Kernel& k, double eps, double x,
                  const std::function<double(double)>& base) {
    double s = 0.0;
    for (int i = 0; i < k.nodes.size(); ++i)
        s += k.d_weights[i] * base(x - eps * k.nodes[i]);
    return s / eps;
}

}  // namespace

double MollifiedDrift::value(double t, double x, const BrownianPath& w) const {
    const double cut = mollifier::eta(epsilon * x);
    if (cut == 0.0) return 0.0;
    static thread_local int cached_qp = 0;
    static thread_local Kernel kernel;
    if (cached_qp != quad_points) {
        kernel = make_kernel(quad_points);
        cached_qp = quad_points;
    }
    auto slice = [&](double y) { return base.eval(t, y, w); };
    return cut * conv_value(kernel, epsilon, x, slice);
}

double MollifiedDrift::derivative(double t, double x, const BrownianPath& w) const {
    static thread_local int cached_qp = 0;
    static thread_local Kernel kernel;
    if (cached_qp != quad_points) {
        kernel = make_kernel(quad_points);
        cached_qp = quad_points;
    }
    const double cut = mollifier::eta(epsilon * x);
    const double dcut = epsilon * mollifier::eta_prime(epsilon * x);
    if (cut == 0.0 && dcut == 0.0) return 0.0;
    auto slice = [&](double y) { return base.eval(t, y, w); };
    double c = (dcut != 0.0) ? conv_value(kernel, epsilon, x, slice) : 0.0;
    double dc = (cut != 0.0) ? conv_deriv(kernel, epsilon, x, slice) : 0.0;
    return dcut * c + cut * dc;
}

DriftField MollifiedDrift::as_field() const {
    MollifiedDrift self = *this;
    DriftField field;
    field.name = base.name + "^eps";
    field.smoothness = Smoothness::smooth;
    field.eval = [self](double t, double x, const BrownianPath& w) {
        return self.value(t, x, w);
    };
    field.deriv = [self](double t, double x, const BrownianPath& w) {
        return self.derivative(t, x, w);
    };
    if (base.support_bound)
        field.support_bound = std::min(*base.support_bound + epsilon, 2.0 / epsilon);
    else
        field.support_bound = 2.0 / epsilon;
    if (base.spatial && !base.shifted) {
        MollifiedDrift s2 = *this;
        static const BrownianPath dummy = sample_path(TimeGrid(0.0, 1.0, 1), 0);
        field.spatial = [s2](double x) { return s2.value(0.0, x, dummy); };
        field.spatial_deriv = [s2](double x) { return s2.derivative(0.0, x, dummy); };
    }
    return field;
}

MollifiedDrift mollify(const DriftField& drift, double epsilon, int quad_points) {
    if (!(epsilon > 0.0)) throw ConfigError("mollify: epsilon must be positive");
    if (quad_points < 17) throw ConfigError("mollify: need at least 17 kernel nodes");
    return MollifiedDrift{drift, epsilon, quad_points};
}

SpatialFn mollify_initial(const SpatialFn& u0, double epsilon, int quad_points) {
    if (!(epsilon > 0.0)) throw ConfigError("mollify_initial: epsilon must be positive");
    const Kernel kernel = make_kernel(quad_points);
    return [kernel, epsilon, u0](double x) {
        const double cut = mollifier::eta(epsilon * x);
        if (cut == 0.0) return 0.0;
        return cut * conv_value(kernel, epsilon, x, u0);
    };
}

Eigen::ArrayXd convolve_grid(const Eigen::ArrayXd& values, double dz, double eps) {
    if (dz > eps / 8.0 + 1e-15)
        throw ConfigError("convolve_grid: dz must satisfy dz <= eps/8");
    const int half = static_cast<int>(std::ceil(eps / dz));
    Eigen::ArrayXd kernel(2 * half + 1);
    for (int j = -half; j <= half; ++j) kernel[j + half] = mollifier::rho(j * dz / eps);
    kernel /= kernel.sum();
    const Eigen::Index n = values.size();
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
        for (Eigen::Index j = lo; j <= hi; ++j) s += kernel[j - i + half] * values[j];
        out[i] = s;
    }
    return out;
}

namespace {

struct Table {
    double lo, dz;
    Eigen::ArrayXd vals;
    double at(double x) const {
        const Eigen::Index n = vals.size();
        double s = (x - lo) / dz;
        if (s <= 0.0) return vals[0];
        if (s >= double(n - 1)) return vals[n - 1];
        const Eigen::Index i = static_cast<Eigen::Index>(s);
        const double w = s - double(i);
        return (1.0 - w) * vals[i] + w * vals[i + 1];
    }
};

}  // namespace

DriftField tabulate_spatial(const DriftField& field, double lo, double hi, int n_nodes) {
    if (n_nodes < 2) throw ConfigError("tabulate_spatial: need at least 2 nodes");
    static const BrownianPath dummy = sample_path(TimeGrid(0.0, 1.0, 1), 0);
    const double dz = (hi - lo) / (n_nodes - 1);
    auto values = std::make_shared<Table>(Table{lo, dz, Eigen::ArrayXd(n_nodes)});
    auto derivs = field.deriv
                      ? std::make_shared<Table>(Table{lo, dz, Eigen::ArrayXd(n_nodes)})
                      : nullptr;
    for (int i = 0; i < n_nodes; ++i) {
        const double x = lo + i * dz;
        values->vals[i] = field.eval(0.0, x, dummy);
        if (derivs) derivs->vals[i] = field.deriv(0.0, x, dummy);
    }
    DriftField out;
    out.name = field.name + "[tab]";
    out.smoothness = field.smoothness;
    out.support_bound = field.support_bound;
    out.spatial = [values](double x) { return values->at(x); };
    out.eval = [values](double, double x, const BrownianPath&) { return values->at(x); };
    if (derivs) {
        out.spatial_deriv = [derivs](double x) { return derivs->at(x); };
        out.deriv = [derivs](double, double x, const BrownianPath&) {
            return derivs->at(x);
        };
    }
    return out;
}

}  // namespace rnlab
