#include <doctest.h>

#include <cmath>
#include <vector>

#include "optsub/design.hpp"
#include "optsub/linalg.hpp"
#include "optsub/special.hpp"

using namespace optsub;

TEST_CASE("optimal threshold") {
    SUBCASE("normal d=2 alpha=0.1") {
        const double q = optimal_threshold(Family::Normal, 2, 3.0, 0.1);
        CHECK(q == doctest::Approx(4.605170).epsilon(1e-6));
        CHECK(std::sqrt(q) == doctest::Approx(2.146).epsilon(1e-3));
    }
    SUBCASE("alpha near one accepts everything") {
        double prev = optimal_threshold(Family::Normal, 5, 3.0, 0.99);
        for (double a : {0.999, 0.9999, 0.999999}) {
            const double q = optimal_threshold(Family::Normal, 5, 3.0, a);
            CHECK(q < prev);
            prev = q;
        }
        CHECK(prev < 0.01);
        CHECK(optimal_threshold(Family::StudentT, 5, 3.0, 0.999999) < 0.01);
    }
    SUBCASE("student-t tail probability matches alpha by MC") {
        const double q = optimal_threshold(Family::StudentT, 2, 3.0, 0.1);
        CHECK(q == doctest::Approx(2.0 * f_quantile(0.9, 2, 3)).epsilon(1e-12));
        RngStream rng(31, 0);
        const index_t n = 1000000;
        index_t above = 0;
        for (index_t i = 0; i < n; ++i)
            if (sample_squared_radius(Family::StudentT, 2, 3.0, rng) >= q) ++above;
        CHECK(static_cast<double>(above) / static_cast<double>(n) ==
              doctest::Approx(0.1).epsilon(0.03));  // 0.003 absolute
    }
}

TEST_CASE("second moment closed form") {
    SUBCASE("d=2 alpha=0.1 in closed form") {
        // q = -2 ln(alpha), f(q) = alpha/2, so m2 = alpha + q * alpha / 2
        CHECK(second_moment_normal(2, 0.1) == doctest::Approx(0.330259).epsilon(1e-5));
    }
    SUBCASE("full-proportion limit is the unit variance") {
        CHECK(second_moment_normal(3, 0.99999) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("d=1 against the MC oracle") {
        RngStream rng(32, 0);
        const auto mc = second_moment_mc(Family::Normal, 1, 3.0, 0.5, 4000000, rng);
        const double closed = second_moment_normal(1, 0.5);
        CHECK(std::abs(closed - mc.value) <= std::max(1e-3, 3.0 * mc.std_error));
    }
    SUBCASE("always above alpha times the marginal variance") {
        for (index_t d : {1u, 2u, 5u, 10u, 50u, 1000u})
            for (double a : {0.001, 0.01, 0.1, 0.5, 0.9})
                CHECK(second_moment_normal(d, a) > a);
    }
}

TEST_CASE("second moment MC") {
    SUBCASE("agrees with the closed form at d=2") {
        RngStream rng(33, 0);
        const auto mc = second_moment_mc(Family::Normal, 2, 3.0, 0.1, 1000000, rng);
        CHECK(mc.value == doctest::Approx(0.3303).epsilon(0.0061));  // +-0.002
        CHECK(std::abs(mc.value - second_moment_normal(2, 0.1)) <= 3.0 * mc.std_error);
    }
    SUBCASE("no truncation returns the marginal variance") {
        CHECK(second_moment(Family::Normal, 4, 3.0, 1.0) == 1.0);
        CHECK(second_moment(Family::StudentT, 4, 3.0, 1.0) == doctest::Approx(3.0));
        RngStream rng(34, 0);
        double acc = 0.0;
        const index_t n = 400000;
        for (index_t i = 0; i < n; ++i)
            acc += sample_squared_radius(Family::StudentT, 4, 3.0, rng) / 4.0;
        CHECK(acc / n == doctest::Approx(3.0).epsilon(0.05));
    }
    SUBCASE("monotone in alpha") {
        RngStream r1(35, 0), r2(35, 1);
        const auto lo = second_moment_mc(Family::Normal, 3, 3.0, 0.1, 400000, r1);
        const auto hi = second_moment_mc(Family::Normal, 3, 3.0, 0.2, 400000, r2);
        CHECK(hi.value > lo.value);
    }
    SUBCASE("student-t m2 beats the uniform baseline") {
        // m2 > alpha * nu/(nu-2), the t analogue of the normal bound
        const double m2 = second_moment(Family::StudentT, 2, 3.0, 0.1);
        CHECK(m2 > 0.1 * 3.0);
    }
}

TEST_CASE("uniform efficiency") {
    SUBCASE("d=2 alpha=0.1 value") {
        CHECK(uniform_efficiency(Family::Normal, 2, 3.0, 0.1) ==
              doctest::Approx(0.302792).epsilon(1e-5));
        CHECK(uniform_efficiency(Family::Normal, 2, 3.0, 0.1) ==
              doctest::Approx(0.1 / 0.330259).epsilon(1e-5));
    }
    SUBCASE("high dimension keeps uniform competitive") {
        CHECK(uniform_efficiency(Family::Normal, 1000, 3.0, 0.01) >= 0.89);
    }
    SUBCASE("bounded by (alpha, 1) and monotone") {
        const std::vector<index_t> dims = {1, 2, 5, 10, 50, 1000};
        const std::vector<double> alphas = {0.001, 0.01, 0.1, 0.3, 0.5};
        for (double a : alphas) {
            double prev = 0.0;
            for (index_t d : dims) {
                const double eff = uniform_efficiency(Family::Normal, d, 3.0, a);
                CHECK(eff > a);
                CHECK(eff < 1.0);
                CHECK(eff > prev);  // increasing in d at fixed alpha
                prev = eff;
            }
        }
        for (index_t d : dims) {
            double prev = 0.0;
            for (double a : alphas) {
                const double eff = uniform_efficiency(Family::Normal, d, 3.0, a);
                CHECK(eff > prev);  // increasing in alpha at fixed d
                prev = eff;
            }
        }
    }
    SUBCASE("student-t path stays in range") {
        const double eff = uniform_efficiency(Family::StudentT, 5, 3.0, 0.1);
        CHECK(eff > 0.1);
        CHECK(eff < 1.0);
    }
}

TEST_CASE("slope covariance approximation") {
    SUBCASE("normal spherical per-coordinate variance") {
        const index_t n = 100000, k = 1000, d = 2;
        const auto approx =
            slope_cov_approx(Family::Normal, d, 3.0, n, k, CovSpec::identity(d));
        const double alpha = static_cast<double>(k) / n;
        const double q = chi2_quantile(1.0 - alpha, 2);
        const double want =
            1.0 / (k + (2.0 * n / d) * q * chi2_density(q, 2));
        CHECK(approx.per_coord_var == doctest::Approx(want).epsilon(1e-12));
        CHECK(approx.matrix[0] == doctest::Approx(want).epsilon(1e-10));
        CHECK(approx.matrix[1] == doctest::Approx(0.0));
        CHECK(approx.standardized_det == doctest::Approx(want).epsilon(1e-10));
    }
    SUBCASE("k equal to n reduces to the full-data variance") {
        const auto approx =
            slope_cov_approx(Family::Normal, 3, 3.0, 5000, 5000, CovSpec::identity(3));
        CHECK(approx.per_coord_var == doctest::Approx(1.0 / 5000.0).epsilon(1e-12));
    }
    SUBCASE("k above n is rejected") {
        CHECK_THROWS_AS(
            slope_cov_approx(Family::Normal, 2, 3.0, 10, 11, CovSpec::identity(2)),
            KLargerThanN);
    }
    SUBCASE("general dispersion scales by det(Sigma)^{-1/d}") {
        CovSpec cov = CovSpec::compound_symmetry(2, 0.5);
        const auto approx = slope_cov_approx(Family::Normal, 2, 3.0, 10000, 1000, cov);
        // det(Sigma_0.5) = 0.75 at d=2
        const auto sph =
            slope_cov_approx(Family::Normal, 2, 3.0, 10000, 1000, CovSpec::identity(2));
        CHECK(approx.standardized_det ==
              doctest::Approx(sph.standardized_det / std::sqrt(0.75)).epsilon(1e-10));
    }
}

TEST_CASE("sensitivity verifier") {
    RngStream rng(36, 0);
    SUBCASE("optimal design passes with the expected boundary value") {
        const DesignSpec design =
            make_design(Family::Normal, 2, 3.0, 0.1, CovSpec::identity(2));
        const auto report = verify_optimality_sensitivity(design, 100000, rng);
        CHECK(report.verdict);
        CHECK(report.c_star_estimate == doctest::Approx(2.3944).epsilon(1e-3));
        CHECK(report.mc_points == 100000);
    }
    SUBCASE("halved threshold fails") {
        DesignSpec wrong = make_design(Family::Normal, 2, 3.0, 0.1, CovSpec::identity(2));
        wrong.q_threshold *= 0.5;
        CHECK_FALSE(verify_optimality_sensitivity(wrong, 100000, rng).verdict);
    }
    SUBCASE("inflated threshold fails") {
        DesignSpec wrong = make_design(Family::Normal, 2, 3.0, 0.1, CovSpec::identity(2));
        wrong.q_threshold *= 1.25;
        CHECK_FALSE(verify_optimality_sensitivity(wrong, 100000, rng).verdict);
    }
    SUBCASE("student-t design passes") {
        const DesignSpec design =
            make_design(Family::StudentT, 5, 3.0, 0.05, CovSpec::identity(5));
        CHECK(verify_optimality_sensitivity(design, 100000, rng).verdict);
    }
}

TEST_CASE("s2 over alpha diverges as alpha shrinks") {
    const std::vector<double> grid = {0.5, 0.1, 0.01, 0.001};
    const auto ratios = s2_over_alpha_divergence(Family::Normal, 2, 3.0, grid);
    REQUIRE(ratios.size() == 4);
    for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] > ratios[i - 1]);
    // lower bound from the tail truncation: s2/alpha >= q / d
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(ratios[i] >= optimal_threshold(Family::Normal, 2, 3.0, grid[i]) / 2.0);
    // two-point instance
    CHECK(second_moment_normal(2, 0.25) / 0.25 > second_moment_normal(2, 0.5) / 0.5);
    CHECK_THROWS(s2_over_alpha_divergence(Family::Normal, 2, 3.0, {0.1, 0.5}));
}

TEST_CASE("full and slope determinants differ by the factor alpha") {
    // block information M = diag(alpha, m2 I_d): det(M) = alpha * det(S)
    for (index_t d : {2u, 5u, 50u})
        for (double alpha : {0.01, 0.1, 0.5}) {
            const double m2 = second_moment_normal(d, alpha);
            const index_t p = d + 1;
            std::vector<double> m(p * p, 0.0);
            m[0] = alpha;
            for (index_t j = 1; j < p; ++j) m[j * p + j] = m2;
            std::vector<double> s(d * d, 0.0);
            for (index_t j = 0; j < d; ++j) s[j * d + j] = m2;
            const double logdet_m = cholesky_logdet(cholesky(m, p));
            const double logdet_s = cholesky_logdet(cholesky(s, d));
            CHECK(logdet_m ==
                  doctest::Approx(std::log(alpha) + logdet_s).epsilon(1e-12));
        }
}
