#include "optsub/samplers.hpp"

#include <cmath>

#include "optsub/linalg.hpp"

namespace optsub {

EllipticalModel EllipticalModel::normal(CovSpec cov) {
    EllipticalModel m;
    m.family = Family::Normal;
    m.cov = std::move(cov);
    return m;
}

EllipticalModel EllipticalModel::student_t(double nu, CovSpec cov) {
    EllipticalModel m;
    m.family = Family::StudentT;
    m.nu = nu;
    m.cov = std::move(cov);
    return m;
}

void EllipticalModel::validate() const {
    if (family == Family::StudentT && !(nu > 2.0))
        throw Error("EllipticalModel: need nu > 2 for finite second moments");
    cov.validate();
}

namespace {

bool is_identity_dispersion(const CovSpec& cov) {
    const index_t d = cov.dim();
    if (cov.structure == CovStructure::CompoundSymmetry) return cov.rho == 0.0;
    for (index_t i = 0; i < d; ++i)
        for (index_t j = 0; j < d; ++j)
            if (cov.dispersion[i * d + j] != (i == j ? 1.0 : 0.0)) return false;
    return true;
}

}  // namespace

DataMatrix sample_covariates(const EllipticalModel& model, index_t n, RngStream& rng) {
    DataMatrix x;
    sample_covariates_into(model, n, rng, x);
    return x;
}

void sample_covariates_into(const EllipticalModel& model, index_t n, RngStream& rng,
                            DataMatrix& x) {
    const CovSpec& cov = model.cov;
    const index_t d = cov.dim();
    x.n = n;
    x.d = d;
    x.values.resize(n * d);
    x.response.reset();
    const bool student = model.family == Family::StudentT;

    if (is_identity_dispersion(cov)) {
        for (index_t i = 0; i < n; ++i) {
            double* row = x.row(i);
            for (index_t j = 0; j < d; ++j) row[j] = rng.next_normal();
            const double scale = student ? std::sqrt(model.nu / rng.next_chi2(model.nu)) : 1.0;
            for (index_t j = 0; j < d; ++j) row[j] = cov.mean[j] + row[j] * scale;
        }
        return;
    }

    if (cov.structure == CovStructure::CompoundSymmetry && cov.rho >= 0.0) {
        // Sigma_rho = (1-rho) I + rho 11^T, so sqrt(1-rho) z + sqrt(rho) g 1
        // is an exact factor and costs O(d) per row
        const double sr = std::sqrt(cov.rho);
        const double s1 = std::sqrt(1.0 - cov.rho);
        for (index_t i = 0; i < n; ++i) {
            double* row = x.row(i);
            for (index_t j = 0; j < d; ++j) row[j] = s1 * rng.next_normal();
            const double g = sr * rng.next_normal();
            const double scale = student ? std::sqrt(model.nu / rng.next_chi2(model.nu)) : 1.0;
            for (index_t j = 0; j < d; ++j) row[j] = cov.mean[j] + (row[j] + g) * scale;
        }
        return;
    }

    if (cov.structure == CovStructure::Diagonal) {
        std::vector<double> sd(d);
        for (index_t j = 0; j < d; ++j) sd[j] = std::sqrt(cov.dispersion[j * d + j]);
        for (index_t i = 0; i < n; ++i) {
            double* row = x.row(i);
            for (index_t j = 0; j < d; ++j) row[j] = sd[j] * rng.next_normal();
            const double scale = student ? std::sqrt(model.nu / rng.next_chi2(model.nu)) : 1.0;
            for (index_t j = 0; j < d; ++j) row[j] = cov.mean[j] + row[j] * scale;
        }
        return;
    }

    const CholFactor chol = cholesky(cov);
    std::vector<double> z(d);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < d; ++j) z[j] = rng.next_normal();
        const double scale = student ? std::sqrt(model.nu / rng.next_chi2(model.nu)) : 1.0;
        double* row = x.row(i);
        for (index_t j = 0; j < d; ++j) {
            const double* lrow = chol.lower.data() + j * d;
            double acc = 0.0;
            for (index_t m = 0; m <= j; ++m) acc += lrow[m] * z[m];
            row[j] = cov.mean[j] + acc * scale;
        }
    }
}

std::vector<double> sample_normal_errors(index_t n, double sigma, RngStream& rng) {
    if (sigma <= 0.0) throw NonPositiveSigma("sample_normal_errors: sigma <= 0");
    std::vector<double> e(n);
    for (index_t i = 0; i < n; ++i) e[i] = sigma * rng.next_normal();
    return e;
}

double sample_squared_radius(Family family, index_t d, double nu, RngStream& rng) {
    const double r2 = rng.next_chi2(static_cast<double>(d));
    if (family == Family::Normal) return r2;
    return nu * r2 / rng.next_chi2(nu);
}

}  // namespace optsub
