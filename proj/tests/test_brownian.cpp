#include <doctest.h>

#include <cmath>

#include "rnlab/brownian.hpp"

using namespace rnlab;

TEST_CASE("sample_path is deterministic and starts at zero") {
    TimeGrid grid(0.0, 1.0, 128);
    BrownianPath a = sample_path(grid, 42);
    BrownianPath b = sample_path(grid, 42);
    CHECK(a.values[0] == 0.0);
    CHECK((a.values == b.values).all());
    BrownianPath c = sample_path(grid, 43);
    CHECK(a.values[128] != c.values[128]);
}

TEST_CASE("increment statistics: mean ~ 0, Var B_1 ~ 1 over 1e5 seeds") {
    TimeGrid grid(0.0, 1.0, 1);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < n; ++s) {
        const double z = sample_path(grid, s).values[1];
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 3e-2);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("refinement restricts exactly to the coarse grid") {
    TimeGrid grid(0.0, 2.0, 16);
    BrownianPath coarse = sample_path(grid, 7);
    for (int factor : {2, 3, 4, 5}) {
        BrownianPath fine = refine(coarse, factor);
        REQUIRE(fine.grid.n_steps == 16 * factor);
        for (int i = 0; i <= 16; ++i)
            CHECK(fine.values[i * factor] == coarse.values[i]);  // bit-exact
    }
}

TEST_CASE("bridge midpoint mean and variance on [0,1]") {
    // endpoints pinned at 0: midpoint is N(0, 1/4)
    TimeGrid grid(0.0, 1.0, 1);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < n; ++s) {
        BrownianPath p = sample_path(grid, s);
        p.values[1] = 0.0;  // pin the right endpoint
        BrownianPath fine = refine(p, 2);
        sum += fine.values[1];
        sum_sq += fine.values[1] * fine.values[1];
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    const double sigma = 0.5;
    CHECK(std::abs(mean) < 3.0 * sigma / std::sqrt(double(n)));
    CHECK(var == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("ito integral identities") {
    TimeGrid grid(0.0, 1.0, 1000);
    BrownianPath p = sample_path(grid, 11);
    Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(1001);
    CHECK(ito_integral(ones, p) == doctest::Approx(p.values[1000]).epsilon(1e-14));
    Eigen::ArrayXd zeros = Eigen::ArrayXd::Zero(1001);
    CHECK(ito_integral(zeros, p) == 0.0);

    // integrand = B: sum B_i dB_i = (B_T^2 - sum dB^2)/2 exactly
    const double qv = quadratic_covariation(p.values, p.values);
    const double bt = p.values[1000];
    CHECK(ito_integral(p.values, p) == doctest::Approx(0.5 * (bt * bt - qv)).epsilon(1e-12));
    // Stratonovich midpoint sum of B dB telescopes to B_T^2/2 exactly
    CHECK(stratonovich_integral(p.values, p) ==
          doctest::Approx(0.5 * bt * bt).epsilon(1e-12));
    // strat - ito = covariation/2 on the same data
    CHECK(stratonovich_integral(p.values, p) - ito_integral(p.values, p) ==
          doctest::Approx(0.5 * qv).epsilon(1e-12));
}

TEST_CASE("quadratic covariation properties") {
    TimeGrid grid(0.0, 1.0, 10000);
    double sum = 0.0;
    for (int s = 0; s < 100; ++s) {
        BrownianPath p = sample_path(grid, 1000 + s);
        sum += quadratic_covariation(p.values, p.values);
    }
    CHECK(sum / 100.0 == doctest::Approx(1.0).epsilon(0.02));

    BrownianPath p = sample_path(grid, 3);
    Eigen::ArrayXd c = Eigen::ArrayXd::Constant(10001, 4.2);
    CHECK(quadratic_covariation(c, p.values) == 0.0);
    BrownianPath q = sample_path(grid, 4);
    CHECK(quadratic_covariation(p.values, q.values) ==
          quadratic_covariation(q.values, p.values));
}

TEST_CASE("grid mismatch raises") {
    TimeGrid grid(0.0, 1.0, 10);
    BrownianPath p = sample_path(grid, 1);
    Eigen::ArrayXd wrong = Eigen::ArrayXd::Zero(5);
    CHECK_THROWS_AS(ito_integral(wrong, p), GridMismatch);
    CHECK_THROWS_AS(stratonovich_integral(wrong, p), GridMismatch);
}

TEST_CASE("ito-stratonovich gap vanishes for smooth deterministic integrands") {
    // h(t) = sin(t): |ito - strat| -> 0 in RMS at rate >= O(sqrt(dt))
    const int n_seeds = 200;
    double rms_coarse = 0.0, rms_fine = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        BrownianPath coarse = sample_path(TimeGrid(0.0, 1.0, 64), 500 + s);
        BrownianPath fine = refine(coarse, 16);
        auto gap = [](const BrownianPath& p) {
            Eigen::ArrayXd h = p.grid.nodes().sin();
            return ito_integral(h, p) - stratonovich_integral(h, p);
        };
        rms_coarse += gap(coarse) * gap(coarse);
        rms_fine += gap(fine) * gap(fine);
    }
    rms_coarse = std::sqrt(rms_coarse / n_seeds);
    rms_fine = std::sqrt(rms_fine / n_seeds);
    const double order = std::log2(rms_coarse / rms_fine) / std::log2(16.0);
    CHECK(order >= 0.5);
}

TEST_CASE("martingale property of the ito integral over 1e4 seeds") {
    // adapted integrand B_t itself
    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < n; ++s) {
        BrownianPath p = sample_path(TimeGrid(0.0, 1.0, 64), 9000 + s);
        const double v = ito_integral(p.values, p);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean) <= 3.0 * se);
}
