#include <doctest.h>

#include <cmath>
#include <vector>

#include "optsub/errors.hpp"
#include "optsub/special.hpp"

using namespace optsub;

namespace {

// integral of the chi-square density over [0, inf), via the substitution
// w = t^2 which removes the d = 1 endpoint singularity
double chi2_mass_by_quadrature(int d) {
    const double upper = std::sqrt(chi2_quantile(1.0 - 1e-13, d)) + 1.0;
    const int steps = 40000;  // composite Simpson
    const double h = upper / steps;
    // endpoint limit of 2 t f(t^2): zero unless d = 1, where it is sqrt(2/pi)
    const double at_zero = (d == 1) ? std::sqrt(2.0 / std::acos(-1.0)) : 0.0;
    auto g = [d, at_zero](double t) {
        return t == 0.0 ? at_zero : 2.0 * t * chi2_density(t * t, d);
    };
    double acc = g(0.0) + g(upper);
    for (int i = 1; i < steps; ++i) acc += g(i * h) * ((i % 2) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Student-t CDF through the incomplete beta, inverted by pure bisection;
// shares only beta_i with the production quantile path
double t_quantile_bisect(double p, double nu) {
    auto cdf = [nu](double t) {
        const double x = nu / (nu + t * t);
        const double tail = 0.5 * beta_i(0.5 * nu, 0.5, x);
        return t >= 0.0 ? 1.0 - tail : tail;
    };
    double lo = 0.0, hi = 1.0;
    while (cdf(hi) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("chi2 density") {
    CHECK(chi2_density(0.0, 2) == doctest::Approx(0.5));
    CHECK(chi2_density(4.60517018598809, 2) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi2_density(0.0, 5) == 0.0);
    CHECK(chi2_density(0.0, 1) > 1e100);  // clamped pole
    CHECK_THROWS_AS(chi2_density(1.0, 0), InvalidDegrees);

    for (int d : {1, 2, 5, 10, 50})
        CHECK(chi2_mass_by_quadrature(d) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("chi2 quantile") {
    SUBCASE("fig-2 caption value") {
        const double q = chi2_quantile(0.9, 2);
        CHECK(q == doctest::Approx(4.605170).epsilon(1e-6));
        CHECK(std::sqrt(q) == doctest::Approx(2.146).epsilon(1e-3));
    }
    SUBCASE("d=1 equals the squared normal quantile") {
        CHECK(chi2_quantile(0.95, 1) == doctest::Approx(3.841459).epsilon(1e-6));
        const double z = normal_quantile(0.975);
        CHECK(z == doctest::Approx(1.959964).epsilon(1e-6));
        CHECK(chi2_quantile(0.95, 1) == doctest::Approx(z * z).epsilon(1e-10));
    }
    SUBCASE("round trips across the grid") {
        for (int d : {1, 2, 5, 10, 50, 1000})
            for (double p : {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999}) {
                const double q = chi2_quantile(p, d);
                CHECK(std::abs(chi2_cdf(q, d) - p) <= 1e-9);
            }
    }
    SUBCASE("rejects bad input") {
        CHECK_THROWS_AS(chi2_quantile(0.5, 0), InvalidDegrees);
        CHECK_THROWS(chi2_quantile(0.0, 2));
        CHECK_THROWS(chi2_quantile(1.0, 2));
    }
}

TEST_CASE("f quantile") {
    SUBCASE("equal degrees have median one") {
        for (int d : {1, 2, 7, 40}) CHECK(std::abs(f_quantile(0.5, d, d) - 1.0) <= 1e-9);
    }
    SUBCASE("d1=1 equals the squared t quantile") {
        for (double p : {0.6, 0.9, 0.99})
            for (double nu : {3.0, 5.0, 17.0}) {
                const double t = t_quantile_bisect(0.5 * (1.0 + p), nu);
                CHECK(f_quantile(p, 1, nu) == doctest::Approx(t * t).epsilon(1e-9));
            }
    }
    SUBCASE("round trips across the grid") {
        for (int d1 : {1, 2, 5, 50, 1000})
            for (int d2 : {1, 3, 10, 200})
                for (double p : {0.001, 0.1, 0.5, 0.9, 0.999}) {
                    const double x = f_quantile(p, d1, d2);
                    CHECK(std::abs(f_cdf(x, d1, d2) - p) <= 1e-9);
                }
        const double x = f_quantile(0.9, 50, 3);
        CHECK(std::abs(f_cdf(x, 50, 3) - 0.9) <= 1e-9);
    }
}

TEST_CASE("incomplete gamma and beta identities") {
    for (double a : {0.5, 1.0, 2.5, 25.0, 500.0})
        for (double x : {0.1, 1.0, 10.0, 400.0}) {
            CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(gamma_p(a, x) >= 0.0);
            CHECK(gamma_p(a, x) <= 1.0);
        }
    // P(1, x) = 1 - exp(-x)
    for (double x : {0.2, 1.0, 5.0})
        CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));

    for (double a : {0.5, 2.0, 30.0})
        for (double b : {0.5, 4.0, 11.0})
            for (double x : {0.05, 0.3, 0.7, 0.95})
                CHECK(beta_i(a, b, x) ==
                      doctest::Approx(1.0 - beta_i(b, a, 1.0 - x)).epsilon(1e-11));
    // I_x(1,1) = x
    CHECK(beta_i(1.0, 1.0, 0.42) == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("normal quantile round trip") {
    for (double p : {1e-6, 0.001, 0.025, 0.5, 0.841344746068543, 0.999, 1.0 - 1e-6}) {
        const double z = normal_quantile(p);
        CHECK(normal_cdf(z) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    // Phi(1) known to 15 digits
    CHECK(normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-12));
}
