#pragma once

#include "optsub/rng.hpp"
#include "optsub/types.hpp"

namespace optsub {

enum class Family { Normal, StudentT };

/// Covariate distribution: multivariate normal or multivariate t with
/// dispersion cov. For StudentT, nu > 2 so second moments exist.
struct EllipticalModel {
    Family family = Family::Normal;
    double nu = 3.0;  // StudentT only
    CovSpec cov;

    static EllipticalModel normal(CovSpec cov);
    static EllipticalModel student_t(double nu, CovSpec cov);

    void validate() const;
};

/// Draws n i.i.d. covariate rows. Normal: x = mu + L z. StudentT:
/// x = mu + L z / sqrt(w / nu), w ~ chi^2_nu. Compound symmetry with
/// rho >= 0 uses the O(nd) factor sqrt(1-rho) I | sqrt(rho) 1.
DataMatrix sample_covariates(const EllipticalModel& model, index_t n, RngStream& rng);

/// Same draw, writing into an existing buffer (resized as needed) so
/// simulation replicates can reuse one allocation.
void sample_covariates_into(const EllipticalModel& model, index_t n, RngStream& rng,
                            DataMatrix& out);

/// i.i.d. N(0, sigma^2) errors.
std::vector<double> sample_normal_errors(index_t n, double sigma, RngStream& rng);

/// One draw of the squared radius R^2 = ||x||^2 of the standardized
/// (spherical, unit-dispersion) family: chi^2_d for Normal,
/// nu * chi^2_d / chi^2_nu (= d * F(d, nu)) for StudentT.
double sample_squared_radius(Family family, index_t d, double nu, RngStream& rng);

}  // namespace optsub
