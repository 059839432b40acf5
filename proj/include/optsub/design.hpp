#pragma once

#include <cstdint>
#include <vector>

#include "optsub/rng.hpp"
#include "optsub/samplers.hpp"
#include "optsub/types.hpp"

namespace optsub {

/// Closed-form summary of the D-optimal subsampling design of proportion
/// alpha. Thresholds live on the squared-Mahalanobis scale of the
/// standardized (unit-dispersion) coordinates; cov maps back to the data
/// scale. For the centered spherical standardized families used here the
/// per-covariate dispersion s2 equals the second moment m2.
struct DesignSpec {
    double alpha = 0.0;
    index_t d = 0;
    Family family = Family::Normal;
    double nu = 3.0;
    double q_threshold = 0.0;
    double m2 = 0.0;
    double s2 = 0.0;
    CovSpec cov;
};

struct SensitivityReport {
    double min_inside_support = 0.0;
    double max_outside_support = 0.0;
    double c_star_estimate = 0.0;
    index_t mc_points = 0;
    bool verdict = false;
};

/// Acceptance threshold q_{1-alpha} on the squared standardized radius:
/// chi^2_{d,1-alpha} for Normal, d * F_{d,nu,1-alpha} for StudentT.
double optimal_threshold(Family family, index_t d, double nu, double alpha);

/// m2(xi*_alpha) = alpha + (2/d) q f_{chi^2_d}(q) for the normal family.
double second_moment_normal(index_t d, double alpha);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of (1/d) E[R^2 1{R^2 >= q_{1-alpha}}] for the
/// standardized family; the independent oracle for the closed form and
/// the only route for StudentT.
McEstimate second_moment_mc(Family family, index_t d, double nu, double alpha,
                            index_t mc_n, RngStream& rng);

/// Second moment by family: closed form for Normal, seed-pinned MC
/// (1e6 draws) for StudentT. alpha = 1 returns the marginal variance.
double second_moment(Family family, index_t d, double nu, double alpha);

/// D_slope-efficiency of uniform random subsampling,
/// alpha * sigma^2 / m2(xi*_alpha); in (alpha, 1).
double uniform_efficiency(Family family, index_t d, double nu, double alpha);

/// Marginal variance of the standardized family (1 or nu/(nu-2)).
double family_marginal_variance(Family family, double nu);

struct SlopeCovApprox {
    std::vector<double> matrix;  // d x d approximate Cov[beta_slope]
    double standardized_det = 0.0;
    double per_coord_var = 0.0;  // normal-spherical special case
};

/// Asymptotic approximation sigma_eps^2 / (n s2(xi*_{k/n})) Sigma^{-1}
/// to the slope covariance under top-k selection.
SlopeCovApprox slope_cov_approx(Family family, index_t d, double nu, index_t n, index_t k,
                                const CovSpec& cov, double sigma_eps = 1.0);

/// Builds the DesignSpec for (family, d, alpha) in standardized
/// coordinates with the given data-scale cov.
DesignSpec make_design(Family family, index_t d, double nu, double alpha, CovSpec cov);

/// Equivalence-theorem check: the design's acceptance region must be the
/// superlevel set of its sensitivity function at the boundary value c*,
/// with the proportion-alpha mass pinning the true boundary. Passes for
/// the optimal design, fails for perturbed thresholds.
SensitivityReport verify_optimality_sensitivity(const DesignSpec& design, index_t mc_n,
                                                RngStream& rng);

/// s2(xi*_alpha) / alpha along a decreasing alpha grid; diverges as
/// alpha -> 0 for unbounded covariate distributions.
std::vector<double> s2_over_alpha_divergence(Family family, index_t d, double nu,
                                             const std::vector<double>& alpha_grid);

}  // namespace optsub
