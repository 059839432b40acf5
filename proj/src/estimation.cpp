#include "optsub/estimation.hpp"

#include <cmath>
#include <numeric>

#include "optsub/design.hpp"
#include "optsub/linalg.hpp"
#include "optsub/special.hpp"

namespace optsub {
namespace {

MomentAccumulator subsample_moments(const DataMatrix& x, const index_t* rows, index_t k) {
    MomentAccumulator acc(x.d);
    if (!rows) {
        acc.add_rows(x.values.data(), x.n);
        return acc;
    }
    // gather contiguous runs so the block kernel still applies
    std::vector<double> buf;
    buf.reserve(std::min<index_t>(k, kDistanceBlockRows) * x.d);
    index_t done = 0;
    while (done < k) {
        const index_t chunk = std::min<index_t>(kDistanceBlockRows, k - done);
        buf.clear();
        for (index_t r = 0; r < chunk; ++r) {
            const double* src = x.row(rows[done + r]);
            buf.insert(buf.end(), src, src + x.d);
        }
        acc.add_rows(buf.data(), chunk);
        done += chunk;
    }
    return acc;
}

SlopeCovariance slope_cov_impl(const DataMatrix& x, const index_t* rows, index_t k,
                               bool want_matrix) {
    const index_t d = x.d;
    if (k < d + 1) throw SingularInformation("slope_covariance: k < d + 1");
    MomentAccumulator acc = subsample_moments(x, rows, k);
    const std::vector<double> gram = acc.centered_sum();  // X^T X - k xbar xbar^T

    CholFactor chol;
    try {
        chol = cholesky(gram, d);
    } catch (const NotPositiveDefinite&) {
        throw SingularInformation("slope_covariance: centered Gram matrix singular");
    }
    const double logdet_c = -cholesky_logdet(chol);

    SlopeCovariance out;
    out.standardized_det = std::exp(logdet_c / static_cast<double>(d));
    if (want_matrix) out.matrix = cholesky_inverse(chol);
    return out;
}

}  // namespace

SlopeCovariance slope_covariance(const DataMatrix& subsample) {
    return slope_cov_impl(subsample, nullptr, subsample.n, true);
}

SlopeCovariance slope_covariance(const DataMatrix& x, const std::vector<index_t>& rows) {
    return slope_cov_impl(x, rows.data(), rows.size(), true);
}

double slope_standardized_det(const DataMatrix& x, const std::vector<index_t>& rows) {
    return slope_cov_impl(x, rows.data(), rows.size(), false).standardized_det;
}

MseResult simulate_mse(const MseScenario& sc) {
    if (sc.k > sc.n) throw KLargerThanN("simulate_mse: k > n");
    const CovSpec cov = CovSpec::identity(sc.d);
    const EllipticalModel model = sc.family == Family::Normal
                                      ? EllipticalModel::normal(cov)
                                      : EllipticalModel::student_t(sc.nu, cov);
    MseResult result;
    result.squared_errors.resize(sc.replicates);

    for (index_t v = 0; v < sc.replicates; ++v) {
        RngStream rng(sc.seed, v);
        std::vector<double> beta(sc.d + 1);
        for (double& b : beta) b = rng.next_normal();

        DataMatrix x = sample_covariates(model, sc.n, rng);
        std::vector<double> y(sc.n);
        for (index_t i = 0; i < sc.n; ++i) {
            const double* row = x.row(i);
            double mu = beta[0];
            for (index_t j = 0; j < sc.d; ++j) mu += beta[j + 1] * row[j];
            y[i] = mu + (sc.sigma_eps > 0.0 ? sc.sigma_eps * rng.next_normal() : 0.0);
        }
        x.response = std::move(y);

        std::vector<index_t> rows;
        switch (sc.method) {
            case Method::Full: {
                rows.resize(sc.n);
                std::iota(rows.begin(), rows.end(), index_t{0});
                break;
            }
            case Method::DOpt:
                rows = select_top_k_mahalanobis(x, cov, sc.k).indices;
                break;
            case Method::DOptSimplified: {
                std::vector<double> ones(sc.d, 1.0);
                rows = select_top_k_simplified(x, cov.mean, ones, sc.k).indices;
                break;
            }
            case Method::Iboss:
                rows = select_iboss(x, sc.k).indices;
                break;
            case Method::Uniform:
                rows = select_uniform(x, sc.k, rng).indices;
                break;
            case Method::Leverage:
                rows = select_top_k_leverage(x, sc.k).indices;
                break;
            case Method::QuantileThreshold: {
                const double alpha = static_cast<double>(sc.k) / static_cast<double>(sc.n);
                const double q = optimal_threshold(sc.family, sc.d, sc.nu, alpha);
                rows = select_quantile_threshold(x, cov, q).indices;
                break;
            }
        }

        const LeastSquaresFit fit = solve_least_squares(x, rows);
        double err = 0.0;
        for (index_t j = 1; j <= sc.d; ++j) {
            const double e = fit.beta[j] - beta[j];
            err += e * e;
        }
        result.squared_errors[v] = err;
    }

    double total = 0.0;
    for (double e : result.squared_errors) total += e;
    result.mse = total / static_cast<double>(sc.replicates);
    result.standardized_mse = result.mse / static_cast<double>(sc.d);
    return result;
}

double coverage_check(const CoverageScenario& sc, double level) {
    if (!(level > 0.0 && level < 1.0)) throw Error("coverage_check: level outside (0,1)");
    const CovSpec cov = CovSpec::identity(sc.d);
    const EllipticalModel model = EllipticalModel::normal(cov);
    const double q = optimal_threshold(Family::Normal, sc.d, 3.0, sc.alpha);
    const double m2 = second_moment_normal(sc.d, sc.alpha);
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double n_real = static_cast<double>(sc.n);
    // Lemma-style theoretical covariance: sigma^2 (n M(xi*_alpha))^{-1},
    // with M = diag(alpha, m2 I_d) in standardized coordinates.
    const double half_intercept = z * sc.sigma_eps / std::sqrt(n_real * sc.alpha);
    const double half_slope = z * sc.sigma_eps / std::sqrt(n_real * m2);

    index_t covered = 0;
    index_t total = 0;
    for (index_t v = 0; v < sc.replicates; ++v) {
        RngStream rng(sc.seed, v);
        std::vector<double> beta(sc.d + 1);
        for (double& b : beta) b = rng.next_normal();
        DataMatrix x = sample_covariates(model, sc.n, rng);
        std::vector<double> y(sc.n);
        for (index_t i = 0; i < sc.n; ++i) {
            const double* row = x.row(i);
            double mu = beta[0];
            for (index_t j = 0; j < sc.d; ++j) mu += beta[j + 1] * row[j];
            y[i] = mu + (sc.sigma_eps > 0.0 ? sc.sigma_eps * rng.next_normal() : 0.0);
        }
        x.response = std::move(y);
        const std::vector<index_t> rows = select_quantile_threshold(x, cov, q).indices;
        const LeastSquaresFit fit = solve_least_squares(x, rows);
        for (index_t j = 0; j <= sc.d; ++j) {
            const double half = (j == 0) ? half_intercept : half_slope;
            if (std::abs(fit.beta[j] - beta[j]) <= half) ++covered;
            ++total;
        }
    }
    return static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace optsub
