#pragma once

#include <vector>

#include "optsub/rng.hpp"
#include "optsub/samplers.hpp"
#include "optsub/subsample.hpp"
#include "optsub/types.hpp"

namespace optsub {

struct SlopeCovariance {
    std::vector<double> matrix;     // d x d, (X^T X - k xbar xbar^T)^{-1}
    double standardized_det = 0.0;  // det(matrix)^{1/d} via log-determinant
};

/// Conditional slope covariance of a subsample: the inverse centered
/// Gram matrix. The standardized determinant is accumulated on the log
/// scale; at d = 50 the raw determinant underflows doubles.
SlopeCovariance slope_covariance(const DataMatrix& subsample);
SlopeCovariance slope_covariance(const DataMatrix& x, const std::vector<index_t>& rows);

/// Standardized determinant alone (skips forming the inverse matrix).
double slope_standardized_det(const DataMatrix& x, const std::vector<index_t>& rows);

struct MseScenario {
    Family family = Family::Normal;
    double nu = 3.0;
    index_t d = 2;
    index_t n = 10000;
    index_t k = 1000;
    Method method = Method::DOpt;
    index_t replicates = 200;
    std::uint64_t seed = 1;
    double sigma_eps = 1.0;
};

struct MseResult {
    std::vector<double> squared_errors;  // per replicate, ||beta_hat - beta||^2 (slopes)
    double mse = 0.0;                    // mean of squared_errors
    double standardized_mse = 0.0;       // mse / d
};

/// Example-5.1 protocol: per replicate draw beta ~ N(0, I_{d+1}),
/// covariates from the family, N(0, sigma^2) errors, build responses,
/// select subdata, fit least squares, record the squared slope error.
MseResult simulate_mse(const MseScenario& scenario);

struct CoverageScenario {
    index_t d = 2;
    index_t n = 100000;
    double alpha = 0.1;
    index_t replicates = 1000;
    std::uint64_t seed = 1;
    double sigma_eps = 1.0;
};

/// Empirical coverage of per-coordinate CIs built from the theoretical
/// information n * M(xi*_alpha), under Algorithm-1 selection of standard
/// normal covariates. Returns the coverage fraction pooled over the d+1
/// coordinates.
double coverage_check(const CoverageScenario& scenario, double level);

}  // namespace optsub
