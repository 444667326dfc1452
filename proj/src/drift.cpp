#include "rnlab/drift.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rnlab/io.hpp"
#include "rnlab/mollify.hpp"

namespace rnlab {

double Primitive::operator()(double z) const {
    const Eigen::Index n = grid.size();
    if (z <= grid[0]) return values[0];
    if (z >= grid[n - 1]) return values[n - 1];
    const double dz = grid[1] - grid[0];
    double s = (z - grid[0]) / dz;
    Eigen::Index i = static_cast<Eigen::Index>(s);
    if (i >= n - 1) i = n - 2;
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

Primitive primitive(const SpatialFn& field, double z0, double z1, int n_nodes) {
    if (n_nodes < 2) throw ConfigError("primitive: need at least 2 nodes");
    Primitive p;
    p.grid = Eigen::ArrayXd::LinSpaced(n_nodes, z0, z1);
    Eigen::ArrayXd f(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        f[i] = field(p.grid[i]);
        if (!std::isfinite(f[i])) throw NonFiniteState("primitive: non-finite field value");
    }
    p.values = io::cumtrapz(f, (z1 - z0) / (n_nodes - 1));
    return p;
}

PrimitiveTriple make_primitive_triple(const DriftField& drift, double L, int n_nodes) {
    if (!drift.spatial)
        throw MissingData("make_primitive_triple: drift has no spatial structure");
    auto p = std::make_shared<Primitive>(primitive(drift.spatial, -L, L, n_nodes));
    PrimitiveTriple triple;
    if (!drift.shifted) {
        triple.b_tilde = [p](double, double z, const BrownianPath&) { return (*p)(z); };
        return triple;
    }
    // b(t,x,omega) = b0(x - B_t): the antiderivative table shifts with the
    // path, and the Ito expansion of b0(x - B_t) gives g = -b0', f = b0''/2,
    // hence g~ = -b0, f~ = b0'/2 (up to constants absorbed by compact support).
    SpatialFn b0 = drift.spatial;
    SpatialFn b0p = drift.spatial_deriv;
    triple.b_tilde = [p](double t, double z, const BrownianPath& w) {
        return (*p)(z - w.value_at(t));
    };
    triple.g_tilde = [b0](double t, double z, const BrownianPath& w) {
        return -b0(z - w.value_at(t));
    };
    if (b0p)
        triple.f_tilde = [b0p](double t, double z, const BrownianPath& w) {
            return 0.5 * b0p(z - w.value_at(t));
        };
    return triple;
}

namespace {

// exp(1 - 1/(1-y^2)) on (-1,1): unit peak, C^inf, compact support.
double bump_shape(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

double bump_shape_d1(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    const double d = 1.0 - y * y;
    return bump_shape(y) * (-2.0 * y / (d * d));
}

double bump_shape_d2(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    const double d = 1.0 - y * y;
    const double phi1 = -2.0 * y / (d * d);
    const double phi2 = -2.0 * (1.0 + 3.0 * y * y) / (d * d * d);
    return bump_shape(y) * (phi2 + phi1 * phi1);
}

DriftField from_spatial(const std::string& name, SpatialFn b, SpatialFn b1, SpatialFn b2,
                        Smoothness smooth, std::optional<double> support) {
    DriftField field;
    field.name = name;
    field.spatial = b;
    field.spatial_deriv = b1;
    field.spatial_deriv2 = b2;
    field.smoothness = smooth;
    field.support_bound = support;
    field.eval = [b](double, double x, const BrownianPath&) { return b(x); };
    if (b1) field.deriv = [b1](double, double x, const BrownianPath&) { return b1(x); };
    return field;
}

}  // namespace

DriftField catalog(const std::string& name, const CatalogParams& params) {
    if (name == "zero") {
        auto z = [](double) { return 0.0; };
        return from_spatial("zero", z, z, z, Smoothness::smooth, 0.0);
    }
    if (name == "constant") {
        const double c = params.c;
        return from_spatial("constant", [c](double) { return c; },
                            [](double) { return 0.0; }, [](double) { return 0.0; },
                            Smoothness::smooth, std::nullopt);
    }
    if (name == "linear") {
        const double lam = params.lambda;
        return from_spatial("linear", [lam](double x) { return -lam * x; },
                            [lam](double) { return -lam; }, [](double) { return 0.0; },
                            Smoothness::smooth, std::nullopt);
    }
    if (name == "bump") {
        const double a = params.c, c0 = params.center, w = params.width;
        return from_spatial(
            "bump", [a, c0, w](double x) { return a * bump_shape((x - c0) / w); },
            [a, c0, w](double x) { return a * bump_shape_d1((x - c0) / w) / w; },
            [a, c0, w](double x) { return a * bump_shape_d2((x - c0) / w) / (w * w); },
            Smoothness::smooth, std::abs(c0) + w);
    }
    if (name == "sign_sqrt") {
        const double k = params.kappa, r = params.cutoff_radius;
        auto b = [k, r](double x) {
            const double cut = mollifier::eta(x / r);
            if (cut == 0.0 || x == 0.0) return 0.0;
            return k * (x > 0 ? 1.0 : -1.0) * std::sqrt(std::abs(x)) * cut;
        };
        return from_spatial("sign_sqrt", b, nullptr, nullptr, Smoothness::rough, 2.0 * r);
    }
    if (name == "box") {
        const double lo = params.box_lo, hi = params.box_hi;
        auto b = [lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; };
        return from_spatial("box", b, nullptr, nullptr, Smoothness::rough,
                            std::max(std::abs(lo), std::abs(hi)));
    }
    if (name == "shifted") {
        DriftField base = catalog(params.base, params);
        if (!base.spatial_deriv || !base.spatial_deriv2)
            throw MissingData("catalog(shifted): base field must be twice differentiable");
        SpatialFn b0 = base.spatial, b1 = base.spatial_deriv, b2 = base.spatial_deriv2;
        DriftField field;
        field.name = "shifted(" + base.name + ")";
        field.smoothness = Smoothness::smooth;
        field.shifted = true;
        field.spatial = b0;
        field.spatial_deriv = b1;
        field.spatial_deriv2 = b2;
        field.support_bound = std::nullopt;  // support moves with the path
        field.eval = [b0](double t, double x, const BrownianPath& w) {
            return b0(x - w.value_at(t));
        };
        field.deriv = [b1](double t, double x, const BrownianPath& w) {
            return b1(x - w.value_at(t));
        };
        // Ito expansion of b0(x - B_t): db = -b0' dB + (1/2) b0'' dt.
        field.semimartingale_f = [b2](double t, double x, const BrownianPath& w) {
            return 0.5 * b2(x - w.value_at(t));
        };
        field.semimartingale_g = [b1](double t, double x, const BrownianPath& w) {
            return -b1(x - w.value_at(t));
        };
        return field;
    }
    throw ConfigError("catalog: unknown drift name '" + name + "'");
}

HypothesisReport check_hypothesis(const DriftField& drift,
                                  const std::vector<BrownianPath>& omega_samples,
                                  double L, int n_x, const HypothesisCaps& caps) {
    const bool want_fg = caps.f_l1_tx || caps.g_l1t_supx || caps.g_supt_l1x;
    const bool has_fg = drift.semimartingale_f || drift.semimartingale_g;
    if (want_fg && !has_fg)
        throw MissingData("check_hypothesis: f/g norms requested but drift has no "
                          "semimartingale parts");

    HypothesisReport rep;
    rep.has_semimartingale = has_fg;
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(n_x, -L, L);
    const double dx = xs[1] - xs[0];

    for (const auto& w : omega_samples) {
        double f_l1_tx = 0.0;
        double g_l1t_supx = 0.0;
        const int nt = w.grid.n_steps;
        const double dt = w.grid.dt();
        for (int k = 0; k <= nt; ++k) {
            const double t = w.grid.node(k);
            Eigen::ArrayXd babs(n_x);
            for (int i = 0; i < n_x; ++i) babs[i] = std::abs(drift.eval(t, xs[i], w));
            rep.b_sup_t_l1x = std::max(rep.b_sup_t_l1x, io::trapz(babs, dx));
            rep.b_sup = std::max(rep.b_sup, babs.maxCoeff());
            if (has_fg) {
                Eigen::ArrayXd fabs_v = Eigen::ArrayXd::Zero(n_x);
                Eigen::ArrayXd gabs_v = Eigen::ArrayXd::Zero(n_x);
                for (int i = 0; i < n_x; ++i) {
                    if (drift.semimartingale_f)
                        fabs_v[i] = std::abs(drift.semimartingale_f(t, xs[i], w));
                    if (drift.semimartingale_g)
                        gabs_v[i] = std::abs(drift.semimartingale_g(t, xs[i], w));
                }
                const double tw = (k == 0 || k == nt) ? 0.5 * dt : dt;
                f_l1_tx += tw * io::trapz(fabs_v, dx);
                g_l1t_supx += tw * gabs_v.maxCoeff();
                rep.g_supt_l1x = std::max(rep.g_supt_l1x, io::trapz(gabs_v, dx));
            }
        }
        rep.f_l1_tx = std::max(rep.f_l1_tx, f_l1_tx);
        rep.g_l1t_supx = std::max(rep.g_l1t_supx, g_l1t_supx);
    }

    auto check = [&](const std::optional<double>& cap, double value, const char* label) {
        if (cap && value > *cap) {
            rep.passed = false;
            rep.failures.push_back(label);
        }
    };
    check(caps.b_sup_t_l1x, rep.b_sup_t_l1x, "b_sup_t_l1x");
    check(caps.b_sup, rep.b_sup, "b_sup");
    check(caps.f_l1_tx, rep.f_l1_tx, "f_l1_tx");
    check(caps.g_l1t_supx, rep.g_l1t_supx, "g_l1t_supx");
    check(caps.g_supt_l1x, rep.g_supt_l1x, "g_supt_l1x");
    return rep;
}

}  // namespace rnlab
