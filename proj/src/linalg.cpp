#include "optsub/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "optsub/kernels.hpp"
#include "optsub/parallel.hpp"

namespace optsub {

void DataMatrix::validate() const {
    if (n < 1 || d < 1) throw Error("DataMatrix: n and d must be at least 1");
    if (values.size() != n * d) throw DimensionMismatch("DataMatrix: values size != n*d");
    for (double v : values)
        if (!std::isfinite(v)) throw Error("DataMatrix: non-finite entry");
    if (response && response->size() != n)
        throw DimensionMismatch("DataMatrix: response length != n");
}

CovSpec CovSpec::identity(index_t d) {
    CovSpec cov;
    cov.mean.assign(d, 0.0);
    cov.dispersion.assign(d * d, 0.0);
    for (index_t i = 0; i < d; ++i) cov.dispersion[i * d + i] = 1.0;
    cov.structure = CovStructure::Diagonal;
    return cov;
}

CovSpec CovSpec::compound_symmetry(index_t d, double rho) {
    if (d >= 2 && (rho <= -1.0 / static_cast<double>(d - 1) || rho >= 1.0))
        throw Error("compound symmetry: rho outside (-1/(d-1), 1)");
    CovSpec cov;
    cov.mean.assign(d, 0.0);
    cov.dispersion.assign(d * d, rho);
    for (index_t i = 0; i < d; ++i) cov.dispersion[i * d + i] = 1.0;
    cov.structure = CovStructure::CompoundSymmetry;
    cov.rho = rho;
    return cov;
}

CovSpec CovSpec::diagonal(std::vector<double> mean, std::vector<double> variances) {
    const index_t d = mean.size();
    if (variances.size() != d) throw DimensionMismatch("diagonal CovSpec: size mismatch");
    CovSpec cov;
    cov.mean = std::move(mean);
    cov.dispersion.assign(d * d, 0.0);
    for (index_t i = 0; i < d; ++i) {
        if (variances[i] <= 0.0) throw NonPositiveVariance("diagonal CovSpec: variance <= 0");
        cov.dispersion[i * d + i] = variances[i];
    }
    cov.structure = CovStructure::Diagonal;
    return cov;
}

CovSpec CovSpec::general(std::vector<double> mean, std::vector<double> dispersion) {
    const index_t d = mean.size();
    if (dispersion.size() != d * d)
        throw DimensionMismatch("general CovSpec: dispersion size != d*d");
    CovSpec cov;
    cov.mean = std::move(mean);
    cov.dispersion = std::move(dispersion);
    cov.structure = CovStructure::General;
    return cov;
}

void CovSpec::validate() const {
    const index_t d = dim();
    if (d < 1) throw Error("CovSpec: empty");
    if (dispersion.size() != d * d)
        throw DimensionMismatch("CovSpec: dispersion size != d*d");
    double max_abs = 0.0;
    for (double v : dispersion) max_abs = std::max(max_abs, std::abs(v));
    for (index_t i = 0; i < d; ++i)
        for (index_t j = i + 1; j < d; ++j)
            if (std::abs(dispersion[i * d + j] - dispersion[j * d + i]) >
                1e-12 * std::max(1.0, max_abs))
                throw Error("CovSpec: dispersion not symmetric");
    if (structure == CovStructure::Diagonal) {
        for (index_t i = 0; i < d; ++i)
            for (index_t j = 0; j < d; ++j)
                if (i != j && dispersion[i * d + j] != 0.0)
                    throw Error("CovSpec: Diagonal tag with nonzero off-diagonal");
    } else if (structure == CovStructure::CompoundSymmetry) {
        if (d >= 2 && (rho <= -1.0 / static_cast<double>(d - 1) || rho >= 1.0))
            throw Error("CovSpec: compound-symmetry rho outside validity range");
        for (index_t i = 0; i < d; ++i)
            for (index_t j = 0; j < d; ++j) {
                const double want = (i == j) ? 1.0 : rho;
                if (std::abs(dispersion[i * d + j] - want) > 1e-12)
                    throw Error("CovSpec: dispersion does not match compound symmetry tag");
            }
    }
    cholesky(dispersion, d);  // throws NotPositiveDefinite
}

CholFactor cholesky(const std::vector<double>& s, index_t d) {
    if (s.size() != d * d) throw DimensionMismatch("cholesky: size != d*d");
    double max_diag = 0.0;
    for (index_t i = 0; i < d; ++i) max_diag = std::max(max_diag, s[i * d + i]);
    const double tol = 1e-12 * max_diag;

    CholFactor f;
    f.d = d;
    f.lower.assign(d * d, 0.0);
    std::vector<double>& l = f.lower;
    for (index_t i = 0; i < d; ++i) {
        for (index_t j = 0; j <= i; ++j) {
            double sum = s[i * d + j];
            for (index_t m = 0; m < j; ++m) sum -= l[i * d + m] * l[j * d + m];
            if (i == j) {
                if (sum <= tol) throw NotPositiveDefinite("cholesky: pivot below tolerance");
                l[i * d + j] = std::sqrt(sum);
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    return f;
}

CholFactor cholesky(const CovSpec& cov) { return cholesky(cov.dispersion, cov.dim()); }

void cholesky_solve(const CholFactor& chol, std::vector<double>& b) {
    const index_t d = chol.d;
    if (b.size() != d) throw DimensionMismatch("cholesky_solve: rhs size");
    const std::vector<double>& l = chol.lower;
    for (index_t i = 0; i < d; ++i) {
        double s = b[i];
        for (index_t m = 0; m < i; ++m) s -= l[i * d + m] * b[m];
        b[i] = s / l[i * d + i];
    }
    for (index_t ii = d; ii-- > 0;) {
        double s = b[ii];
        for (index_t m = ii + 1; m < d; ++m) s -= l[m * d + ii] * b[m];
        b[ii] = s / l[ii * d + ii];
    }
}

std::vector<double> cholesky_inverse(const CholFactor& chol) {
    const index_t d = chol.d;
    std::vector<double> inv(d * d, 0.0);
    std::vector<double> e(d);
    for (index_t j = 0; j < d; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        cholesky_solve(chol, e);
        for (index_t i = 0; i < d; ++i) inv[i * d + j] = e[i];
    }
    // symmetrize the round-off
    for (index_t i = 0; i < d; ++i)
        for (index_t j = i + 1; j < d; ++j) {
            const double v = 0.5 * (inv[i * d + j] + inv[j * d + i]);
            inv[i * d + j] = inv[j * d + i] = v;
        }
    return inv;
}

double cholesky_logdet(const CholFactor& chol) {
    double acc = 0.0;
    for (index_t i = 0; i < chol.d; ++i) acc += std::log(chol.at(i, i));
    return 2.0 * acc;
}

namespace {

std::vector<double> distances_blocked(
    const DataMatrix& x,
    const std::function<void(const double*, index_t, double*)>& block_kernel) {
    std::vector<double> out(x.n);
    parallel_blocks(x.n, kDistanceBlockRows,
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                        block_kernel(x.values.data() + begin * x.d, end - begin,
                                     out.data() + begin);
                    });
    return out;
}

}  // namespace

std::vector<double> mahalanobis_all(const DataMatrix& x, const CovSpec& cov) {
    const index_t d = x.d;
    if (cov.dim() != d) throw DimensionMismatch("mahalanobis_all: cov dimension != d");
    const auto& k = kernels::active();

    switch (cov.structure) {
        case CovStructure::Diagonal: {
            std::vector<double> inv_var(d);
            for (index_t j = 0; j < d; ++j) {
                const double v = cov.dispersion[j * d + j];
                if (v <= 0.0) throw NotPositiveDefinite("mahalanobis_all: variance <= 0");
                inv_var[j] = 1.0 / v;
            }
            return distances_blocked(x, [&](const double* data, index_t rows, double* out) {
                k.diag_distance(data, rows, d, cov.mean.data(), inv_var.data(), out);
            });
        }
        case CovStructure::CompoundSymmetry: {
            // Sigma_rho^{-1} = 1/(1-rho) * (I - rho/(1-rho+d*rho) * 11^T)
            const double rho = cov.rho;
            const double denom = 1.0 - rho + static_cast<double>(d) * rho;
            if (1.0 - rho <= 0.0 || denom <= 0.0)
                throw NotPositiveDefinite("mahalanobis_all: compound symmetry not PD");
            const double a = 1.0 / (1.0 - rho);
            const double b = rho / denom;
            return distances_blocked(x, [&](const double* data, index_t rows, double* out) {
                k.cs_distance(data, rows, d, cov.mean.data(), a, b, out);
            });
        }
        case CovStructure::General: {
            const CholFactor chol = cholesky(cov);
            std::vector<double> inv_diag(d);
            for (index_t j = 0; j < d; ++j) inv_diag[j] = 1.0 / chol.at(j, j);
            return distances_blocked(x, [&](const double* data, index_t rows, double* out) {
                k.tri_distance(data, rows, d, cov.mean.data(), chol.lower.data(),
                               inv_diag.data(), out);
            });
        }
    }
    throw Error("mahalanobis_all: unknown structure");
}

std::vector<double> simplified_distance_all(const DataMatrix& x,
                                            const std::vector<double>& mean,
                                            const std::vector<double>& variances) {
    const index_t d = x.d;
    if (mean.size() != d || variances.size() != d)
        throw DimensionMismatch("simplified_distance_all: moment sizes != d");
    std::vector<double> inv_var(d);
    for (index_t j = 0; j < d; ++j) {
        if (variances[j] <= 0.0)
            throw NonPositiveVariance("simplified_distance_all: variance <= 0");
        inv_var[j] = 1.0 / variances[j];
    }
    const auto& k = kernels::active();
    return distances_blocked(x, [&](const double* data, index_t rows, double* out) {
        k.diag_distance(data, rows, d, mean.data(), inv_var.data(), out);
    });
}

MomentAccumulator::MomentAccumulator(index_t d)
    : d_(d), mean_(d, 0.0), m2_(d * d, 0.0) {}

void MomentAccumulator::add_rows(const double* data, index_t rows) {
    if (rows == 0) return;
    const auto& k = kernels::active();
    // two passes over the (cache-resident) block: block mean, then
    // cross products centered at the block mean
    std::vector<double> bsum(d_, 0.0);
    k.col_sum(data, rows, d_, bsum.data());
    std::vector<double> bmean(d_);
    for (index_t j = 0; j < d_; ++j) bmean[j] = bsum[j] / static_cast<double>(rows);
    std::vector<double> bm2(d_ * d_, 0.0);
    std::vector<double> scratch(d_);
    k.centered_gram(data, rows, d_, bmean.data(), bm2.data(), scratch.data());

    MomentAccumulator block(d_);
    block.n_ = rows;
    block.mean_ = std::move(bmean);
    block.m2_ = std::move(bm2);
    merge(block);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.d_ != d_) throw DimensionMismatch("MomentAccumulator::merge: dim mismatch");
    if (other.n_ == 0) return;
    if (n_ == 0) {
        n_ = other.n_;
        mean_ = other.mean_;
        m2_ = other.m2_;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double nt = na + nb;
    const double w = na * nb / nt;
    for (index_t j = 0; j < d_; ++j)
        for (index_t m = j; m < d_; ++m) {
            const double dj = other.mean_[j] - mean_[j];
            const double dm = other.mean_[m] - mean_[m];
            m2_[j * d_ + m] += other.m2_[j * d_ + m] + w * dj * dm;
        }
    for (index_t j = 0; j < d_; ++j)
        mean_[j] += (other.mean_[j] - mean_[j]) * (nb / nt);
    n_ += other.n_;
}

std::vector<double> MomentAccumulator::centered_sum() const {
    std::vector<double> s(d_ * d_);
    for (index_t j = 0; j < d_; ++j)
        for (index_t m = j; m < d_; ++m) {
            s[j * d_ + m] = m2_[j * d_ + m];
            s[m * d_ + j] = m2_[j * d_ + m];
        }
    return s;
}

std::vector<double> MomentAccumulator::covariance() const {
    if (n_ < 2) throw TooFewRows("MomentAccumulator: need n >= 2 for covariance");
    std::vector<double> cov = centered_sum();
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (double& v : cov) v *= inv_n;
    return cov;
}

std::pair<std::vector<double>, std::vector<double>> streaming_moments(const DataMatrix& x) {
    if (x.n < 2) throw TooFewRows("streaming_moments: need n >= 2");
    const index_t n_blocks = (x.n + kDistanceBlockRows - 1) / kDistanceBlockRows;
    std::vector<MomentAccumulator> partial(n_blocks, MomentAccumulator(x.d));
    parallel_blocks(x.n, kDistanceBlockRows,
                    [&](std::size_t b, std::size_t begin, std::size_t end) {
                        partial[b].add_rows(x.values.data() + begin * x.d, end - begin);
                    });
    MomentAccumulator total(x.d);
    for (const auto& p : partial) total.merge(p);  // fixed order: deterministic
    return {total.mean(), total.covariance()};
}

namespace {

LeastSquaresFit least_squares_impl(const DataMatrix& x, const index_t* rows, index_t k) {
    if (!x.has_response()) throw Error("solve_least_squares: no response column");
    const index_t p = x.d + 1;
    if (k < p) throw SingularInformation("solve_least_squares: fewer rows than parameters");
    const std::vector<double>& y = *x.response;

    std::vector<double> info(p * p, 0.0);
    std::vector<double> rhs(p, 0.0);
    std::vector<double> f(p);
    for (index_t r = 0; r < k; ++r) {
        const index_t i = rows ? rows[r] : r;
        f[0] = 1.0;
        std::memcpy(f.data() + 1, x.row(i), x.d * sizeof(double));
        const double yi = y[i];
        for (index_t a = 0; a < p; ++a) {
            const double fa = f[a];
            rhs[a] += fa * yi;
            double* irow = info.data() + a * p;
            for (index_t b = a; b < p; ++b) irow[b] += fa * f[b];
        }
    }
    for (index_t a = 0; a < p; ++a)
        for (index_t b = 0; b < a; ++b) info[a * p + b] = info[b * p + a];

    CholFactor chol;
    try {
        chol = cholesky(info, p);
    } catch (const NotPositiveDefinite&) {
        throw SingularInformation("solve_least_squares: observed information singular");
    }
    std::vector<double> beta = rhs;
    cholesky_solve(chol, beta);
    return {std::move(beta), std::move(info)};
}

}  // namespace

LeastSquaresFit solve_least_squares(const DataMatrix& x) {
    return least_squares_impl(x, nullptr, x.n);
}

LeastSquaresFit solve_least_squares(const DataMatrix& x, const std::vector<index_t>& rows) {
    return least_squares_impl(x, rows.data(), rows.size());
}

}  // namespace optsub
