#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "optsub/linalg.hpp"
#include "optsub/samplers.hpp"
#include "optsub/special.hpp"

using namespace optsub;

namespace {

double ks_distance_f(const std::vector<double>& sample, double d1, double d2) {
    std::vector<double> s = sample;
    std::sort(s.begin(), s.end());
    double ks = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double c = f_cdf(s[i], d1, d2);
        ks = std::max(ks, std::abs(c - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return ks;
}

}  // namespace

TEST_CASE("normal covariates match their moments") {
    RngStream rng(21, 0);
    const EllipticalModel model = EllipticalModel::normal(CovSpec::identity(2));
    const DataMatrix x = sample_covariates(model, 100000, rng);
    const auto [mean, cov] = streaming_moments(x);
    CHECK(std::abs(mean[0]) < 0.02);
    CHECK(std::abs(mean[1]) < 0.02);
    CHECK(std::abs(cov[0] - 1.0) < 0.03);
    CHECK(std::abs(cov[3] - 1.0) < 0.03);
    CHECK(std::abs(cov[1]) < 0.03);
}

TEST_CASE("t covariates have dispersion scaled by nu/(nu-2)") {
    RngStream rng(22, 0);
    CovSpec spec = CovSpec::compound_symmetry(2, 0.4);
    const EllipticalModel model = EllipticalModel::student_t(3.0, spec);
    const DataMatrix x = sample_covariates(model, 200000, rng);
    const auto [mean, cov] = streaming_moments(x);
    // second moments of t3 have infinite variance, so the band is wide
    CHECK(cov[0] == doctest::Approx(3.0).epsilon(0.2));
    CHECK(cov[3] == doctest::Approx(3.0).epsilon(0.2));
    CHECK(cov[1] == doctest::Approx(3.0 * 0.4).epsilon(0.25));
    CHECK(std::abs(mean[0]) < 0.05);
}

TEST_CASE("compound-symmetry sampler agrees with the dense factor") {
    const index_t d = 3;
    CovSpec spec = CovSpec::compound_symmetry(d, 0.5);
    RngStream rng_fast(23, 0);
    const DataMatrix fast =
        sample_covariates(EllipticalModel::normal(spec), 100000, rng_fast);
    CovSpec dense = spec;
    dense.structure = CovStructure::General;
    RngStream rng_dense(24, 0);
    const DataMatrix slow =
        sample_covariates(EllipticalModel::normal(dense), 100000, rng_dense);
    const auto [mf, cf] = streaming_moments(fast);
    const auto [ms, cs] = streaming_moments(slow);
    for (index_t e = 0; e < d * d; ++e) {
        CHECK(std::abs(cf[e] - spec.dispersion[e]) < 0.03);
        CHECK(std::abs(cs[e] - spec.dispersion[e]) < 0.03);
    }
}

TEST_CASE("samplers are reproducible") {
    const EllipticalModel model = EllipticalModel::normal(CovSpec::identity(4));
    RngStream a(7, 3), b(7, 3);
    const DataMatrix xa = sample_covariates(model, 500, a);
    const DataMatrix xb = sample_covariates(model, 500, b);
    CHECK(xa.values == xb.values);  // bit-for-bit

    RngStream c(7, 4);
    const DataMatrix xc = sample_covariates(model, 500, c);
    CHECK(xa.values != xc.values);
}

TEST_CASE("normal errors") {
    RngStream rng(25, 0);
    const auto e = sample_normal_errors(100000, 1.0, rng);
    double sum = 0.0, sumsq = 0.0;
    for (double v : e) {
        sum += v;
        sumsq += v * v;
    }
    CHECK(std::abs(sum / e.size()) < 0.01);
    CHECK(std::abs(sumsq / e.size() - 1.0) < 0.02);

    RngStream r1(26, 0), r2(26, 0);
    const auto one = sample_normal_errors(1000, 1.0, r1);
    const auto two = sample_normal_errors(1000, 2.0, r2);
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(two[i] == 2.0 * one[i]);

    RngStream r3(26, 0);
    CHECK_THROWS_AS(sample_normal_errors(10, 0.0, r3), NonPositiveSigma);
}

TEST_CASE("t squared radius is F distributed") {
    // Kolmogorov-Smirnov against F(d, nu) for the standardized radius
    RngStream rng(27, 0);
    const index_t d = 2;
    const double nu = 3.0;
    const EllipticalModel model = EllipticalModel::student_t(nu, CovSpec::identity(d));
    const DataMatrix x = sample_covariates(model, 100000, rng);
    std::vector<double> ratio(x.n);
    for (index_t i = 0; i < x.n; ++i) {
        double r2 = 0.0;
        for (index_t j = 0; j < d; ++j) r2 += x.values[i * d + j] * x.values[i * d + j];
        ratio[i] = r2 / static_cast<double>(d);
    }
    CHECK(ks_distance_f(ratio, d, nu) < 0.01);

    // the direct radial sampler draws from the same law
    RngStream rng2(28, 0);
    std::vector<double> radial(100000);
    for (double& v : radial)
        v = sample_squared_radius(Family::StudentT, d, nu, rng2) / static_cast<double>(d);
    CHECK(ks_distance_f(radial, d, nu) < 0.01);
}

TEST_CASE("model validation") {
    CHECK_THROWS(EllipticalModel::student_t(2.0, CovSpec::identity(2)).validate());
    CHECK_NOTHROW(EllipticalModel::student_t(2.5, CovSpec::identity(2)).validate());
}
