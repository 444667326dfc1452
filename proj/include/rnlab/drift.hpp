#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rnlab/brownian.hpp"
#include "rnlab/errors.hpp"

namespace rnlab {

using FieldFn = std::function<double(double t, double x, const BrownianPath&)>;
using SpatialFn = std::function<double(double x)>;

enum class Smoothness { smooth, rough };

/// A (possibly random) vector field b(t,x,omega) together with whatever
/// structure the catalog entry carries: analytic spatial derivative,
/// semimartingale parts f and g, and a compact-support radius.
struct DriftField {
    std::string name;
    FieldFn eval;
    FieldFn deriv;               // empty when the field is not differentiable
    FieldFn semimartingale_f;    // empty means f == 0
    FieldFn semimartingale_g;    // empty means g == 0
    Smoothness smoothness = Smoothness::smooth;
    std::optional<double> support_bound;

    // Structure flags used to build primitives in closed shifted form.
    // When spatial is set, b(t,x,omega) = spatial(x) (time-independent), or
    // spatial(x - B_t) when shifted is true.
    SpatialFn spatial;
    SpatialFn spatial_deriv;
    SpatialFn spatial_deriv2;
    bool shifted = false;

    bool has_deriv() const { return static_cast<bool>(deriv); }
    double operator()(double t, double x, const BrownianPath& w) const {
        return eval(t, x, w);
    }
};

/// Antiderivatives in space of b, f, g, integrated from the left edge of the
/// truncation domain (standing in for -infinity).
struct PrimitiveTriple {
    FieldFn b_tilde;
    FieldFn f_tilde;  // empty means 0
    FieldFn g_tilde;  // empty means 0
};

/// Cumulative trapezoid antiderivative of a spatial field on [z0, z1],
/// evaluable anywhere in the interval by linear interpolation.
struct Primitive {
    Eigen::ArrayXd grid;
    Eigen::ArrayXd values;
    double operator()(double z) const;
};

Primitive primitive(const SpatialFn& field, double z0, double z1, int n_nodes);

/// Builds the (b~, f~, g~) triple for a catalog drift on [-L, L]. Supports
/// time-independent fields and the shifted family b0(x - B_t); n_nodes sets
/// the quadrature resolution of the underlying antiderivative table.
PrimitiveTriple make_primitive_triple(const DriftField& drift, double L, int n_nodes);

struct CatalogParams {
    double c = 1.0;              // constant value / bump amplitude
    double lambda = 1.0;         // linear: b(x) = -lambda x
    double kappa = 1.0;          // sign-sqrt strength
    double center = 0.0;
    double width = 1.0;
    double box_lo = 0.0;
    double box_hi = 1.0;
    double cutoff_radius = 4.0;  // sign-sqrt support control
    std::string base = "bump";   // shifted: name of the underlying smooth field
};

/// Named drifts: zero | constant | linear | bump | sign_sqrt | box | shifted.
DriftField catalog(const std::string& name, const CatalogParams& params = {});

struct HypothesisReport {
    double b_sup_t_l1x = 0.0;    // ||b||_{L^inf(Omega x [0,T], L^1)}
    double b_sup = 0.0;          // ||b||_{L^inf(Omega x [0,T] x R)}
    double f_l1_tx = 0.0;        // ||f||_{L^inf(Omega, L^1([0,T] x R))}
    double g_l1t_supx = 0.0;     // ||g||_{L^inf(Omega, L^1([0,T], L^inf))}
    double g_supt_l1x = 0.0;     // ||g||_{L^inf(Omega x [0,T], L^1)}
    bool has_semimartingale = false;
    bool passed = true;
    std::vector<std::string> failures;
};

struct HypothesisCaps {
    std::optional<double> b_sup_t_l1x, b_sup, f_l1_tx, g_l1t_supx, g_supt_l1x;
};

/// Estimates the Hypothesis norms by quadrature on [-L, L] x [0, T] and
/// maximization over the supplied omega samples.
HypothesisReport check_hypothesis(const DriftField& drift,
                                  const std::vector<BrownianPath>& omega_samples,
                                  double L, int n_x,
                                  const HypothesisCaps& caps = {});

}  // namespace rnlab
