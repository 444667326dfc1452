#include <doctest.h>

#include <cmath>

#include "rnlab/drift.hpp"
#include "rnlab/io.hpp"
#include "rnlab/mollify.hpp"

using namespace rnlab;

namespace {
const BrownianPath kPath = sample_path(TimeGrid(0.0, 1.0, 64), 5);
}

TEST_CASE("catalog basics") {
    CHECK(catalog("zero").eval(0.3, 1.7, kPath) == 0.0);
    CatalogParams p;
    p.c = 2.5;
    CHECK(catalog("constant", p).eval(0.0, -3.0, kPath) == 2.5);
    p.lambda = 2.0;
    CHECK(catalog("linear", p).eval(0.0, 1.5, kPath) == -3.0);
    CHECK_THROWS_AS(catalog("nope"), ConfigError);
}

TEST_CASE("shifted drift reduces to b0 at t=0") {
    const DriftField d = catalog("shifted");
    const DriftField b0 = catalog("bump");
    for (double x : {-0.7, 0.0, 0.4, 0.9})
        CHECK(d.eval(0.0, x, kPath) == doctest::Approx(b0.eval(0.0, x, kPath)));
}

TEST_CASE("shifted drift satisfies the discrete Ito-formula identity") {
    // b0(x-B_t) - b0(x) + int b0'(x-B_s) dB - 1/2 int b0'' ds -> 0, RMS >= O(sqrt(dt))
    const DriftField b0 = catalog("bump");
    const double x = 0.3;
    const int n_seeds = 128;
    double rms_coarse = 0.0, rms_fine = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        BrownianPath coarse = sample_path(TimeGrid(0.0, 1.0, 32), 100 + s);
        BrownianPath fine = refine(coarse, 16);
        auto residual = [&](const BrownianPath& p) {
            const int n = p.grid.n_steps;
            Eigen::ArrayXd g(n + 1), f(n + 1);
            for (int k = 0; k <= n; ++k) {
                g[k] = b0.spatial_deriv(x - p.values[k]);
                f[k] = b0.spatial_deriv2(x - p.values[k]);
            }
            return b0.spatial(x - p.values[n]) - b0.spatial(x) + ito_integral(g, p) -
                   0.5 * io::trapz(f, p.grid.dt());
        };
        rms_coarse += residual(coarse) * residual(coarse);
        rms_fine += residual(fine) * residual(fine);
    }
    rms_coarse = std::sqrt(rms_coarse / n_seeds);
    rms_fine = std::sqrt(rms_fine / n_seeds);
    const double rate = std::log(rms_coarse / rms_fine) / std::log(16.0);
    CHECK(rate >= 0.4);
}

TEST_CASE("mollify: zero, constant, odd symmetry") {
    const BrownianPath& w = kPath;
    MollifiedDrift z = mollify(catalog("zero"), 0.25);
    CHECK(z.value(0.0, 0.0, w) == 0.0);
    CHECK(z.value(0.0, 1.3, w) == 0.0);

    CatalogParams p;
    p.c = 3.0;
    MollifiedDrift c = mollify(catalog("constant", p), 0.5);
    CHECK(c.value(0.0, 0.0, w) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(c.derivative(0.0, 0.0, w) == doctest::Approx(0.0).epsilon(1e-12));

    DriftField sign;
    sign.eval = [](double, double x, const BrownianPath&) {
        return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    };
    MollifiedDrift s = mollify(sign, 0.25);
    CHECK(s.value(0.0, 0.0, w) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("mollification contracts the sup norm") {
    for (const char* name : {"bump", "box", "sign_sqrt"}) {
        const DriftField d = catalog(name);
        double sup_b = 0.0;
        for (double x = -8.0; x <= 8.0; x += 1e-2)
            sup_b = std::max(sup_b, std::abs(d.eval(0.0, x, kPath)));
        for (double eps : {0.5, 0.25, 0.125}) {
            MollifiedDrift m = mollify(d, eps);
            double sup_m = 0.0;
            for (double x = -8.0; x <= 8.0; x += 2.5e-2)
                sup_m = std::max(sup_m, std::abs(m.value(0.0, x, kPath)));
            CHECK(sup_m <= sup_b + 1e-12);
        }
    }
}

TEST_CASE("mollified field converges: L1 trend and O(eps^2) for smooth b") {
    const DriftField bump = catalog("bump");
    double prev_l1 = 1e300;
    for (int k = 1; k <= 6; ++k) {
        const double eps = std::pow(2.0, -k);
        MollifiedDrift m = mollify(bump, eps);
        double l1 = 0.0;
        const double dz = 1.0 / 512;
        for (double x = -3.0; x <= 3.0; x += dz)
            l1 += std::abs(m.value(0.0, x, kPath) - bump.eval(0.0, x, kPath)) * dz;
        CHECK(l1 <= prev_l1 + 1e-12);
        prev_l1 = l1;
    }
    // sup error at eps and eps/2: second-order kernel
    auto sup_err = [&](double eps) {
        MollifiedDrift m = mollify(bump, eps);
        double e = 0.0;
        for (double x = -1.5; x <= 1.5; x += 1e-2)
            e = std::max(e, std::abs(m.value(0.0, x, kPath) - bump.eval(0.0, x, kPath)));
        return e;
    };
    const double rate = std::log2(sup_err(0.25) / sup_err(0.125));
    CHECK(rate >= 1.4);
}

TEST_CASE("primitive of simple fields") {
    auto zero = [](double) { return 0.0; };
    Primitive p0 = primitive(zero, -2.0, 2.0, 401);
    CHECK(p0(1.3) == 0.0);

    auto box = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
    // trapezoid half-counts the jump cells: error is dz/2 at the breakpoints
    Primitive pb = primitive(box, -2.0, 2.0, 401);
    CHECK(pb(-1.0) == doctest::Approx(0.0));
    CHECK(pb(0.5) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(pb(2.0) == doctest::Approx(1.0).epsilon(0.02));

    // central differences of the primitive recover a smooth field at O(dz^2)
    auto smooth = [](double x) { return std::exp(-x * x); };
    auto fd_err = [&](int n) {
        Primitive p = primitive(smooth, -3.0, 3.0, n);
        const double dz = 6.0 / (n - 1);
        double err = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double x = -3.0 + i * dz;
            err = std::max(err, std::abs((p(x + dz) - p(x - dz)) / (2 * dz) - smooth(x)));
        }
        return err;
    };
    CHECK(fd_err(201) / fd_err(401) >= 3.0);  // ~4x for O(dz^2)
}

TEST_CASE("primitive bound: sup |b~| <= ||b||_L1") {
    for (const char* name : {"bump", "box", "sign_sqrt"}) {
        const DriftField d = catalog(name);
        Primitive p = primitive(d.spatial, -10.0, 10.0, 8001);
        double l1 = 0.0, sup = 0.0;
        const double dz = 20.0 / 8000;
        for (int i = 0; i <= 8000; ++i) {
            const double x = -10.0 + i * dz;
            l1 += std::abs(d.spatial(x)) * dz;
            sup = std::max(sup, std::abs(p(x)));
        }
        CHECK(sup <= l1 + 1e-9);
    }
}

TEST_CASE("check_hypothesis norms") {
    std::vector<BrownianPath> omegas = {kPath};
    const HypothesisReport z = check_hypothesis(catalog("zero"), omegas, 10.0, 2001);
    CHECK(z.b_sup_t_l1x == 0.0);
    CHECK(z.b_sup == 0.0);
    CHECK(z.passed);

    const HypothesisReport box = check_hypothesis(catalog("box"), omegas, 10.0, 20001);
    CHECK(box.b_sup == 1.0);
    CHECK(box.b_sup_t_l1x == doctest::Approx(1.0).epsilon(1e-3));

    DriftField cauchy;
    cauchy.eval = [](double, double x, const BrownianPath&) {
        return 1.0 / (1.0 + x * x);
    };
    const HypothesisReport c = check_hypothesis(cauchy, omegas, 2000.0, 400001);
    CHECK(c.b_sup_t_l1x == doctest::Approx(M_PI).epsilon(2e-3));

    HypothesisCaps caps;
    caps.f_l1_tx = 1.0;
    CHECK_THROWS_AS(check_hypothesis(catalog("box"), omegas, 10.0, 101, caps),
                    MissingData);
}
