#pragma once

#include <utility>
#include <vector>

#include "optsub/types.hpp"

namespace optsub {

/// Default row block size for the distance and moment passes.
inline constexpr index_t kDistanceBlockRows = 4096;

/// Cholesky factorization S = L L^T of a symmetric matrix, row-major.
/// Throws NotPositiveDefinite when a pivot falls below
/// 1e-12 * max(diag(S)).
CholFactor cholesky(const std::vector<double>& s, index_t d);
CholFactor cholesky(const CovSpec& cov);

/// Solves L L^T x = b in place.
void cholesky_solve(const CholFactor& chol, std::vector<double>& b);

/// Inverse of S from its Cholesky factor (dense d x d, row-major).
std::vector<double> cholesky_inverse(const CholFactor& chol);

/// log det(S) = 2 * sum log diag(L).
double cholesky_logdet(const CholFactor& chol);

/// Squared Mahalanobis distance of every row of X to cov.mean under
/// cov.dispersion. Structure-aware: Diagonal and CompoundSymmetry run in
/// O(nd); General factorizes once and runs O(nd^2). Deterministic under
/// any thread count.
std::vector<double> mahalanobis_all(const DataMatrix& x, const CovSpec& cov);

/// Distance ignoring correlation: sum_j (x_ij - mean_j)^2 / var_j.
std::vector<double> simplified_distance_all(const DataMatrix& x,
                                            const std::vector<double>& mean,
                                            const std::vector<double>& variances);

/// Streaming first and second moments with exact chunk merging.
/// Covariance uses the population 1/n normalization. (Users expecting the
/// 1/(n-1) sample convention: the selection rules only need moments up to
/// a scalar, and at the intended n the difference is immaterial.)
class MomentAccumulator {
public:
    explicit MomentAccumulator(index_t d);

    void add_rows(const double* data, index_t rows);
    void merge(const MomentAccumulator& other);

    index_t count() const { return n_; }
    index_t dim() const { return d_; }
    std::vector<double> mean() const { return mean_; }

    /// Sum of (x - mean)(x - mean)^T, dense symmetric d x d.
    std::vector<double> centered_sum() const;

    /// Population covariance centered_sum() / n. Requires n >= 2.
    std::vector<double> covariance() const;

private:
    index_t d_;
    index_t n_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;  // upper triangle filled, row-major
};

/// Mean vector and population covariance of X, computed blockwise and in
/// parallel with a deterministic merge order. Requires n >= 2.
std::pair<std::vector<double>, std::vector<double>> streaming_moments(const DataMatrix& x);

struct LeastSquaresFit {
    std::vector<double> beta;  // length d+1, intercept first
    std::vector<double> info;  // (d+1)^2 observed information sum f f^T
};

/// Ordinary least squares of the response on (1, x). Throws
/// SingularInformation when the observed information is not PD.
LeastSquaresFit solve_least_squares(const DataMatrix& x);

/// As above but restricted to the given rows of X.
LeastSquaresFit solve_least_squares(const DataMatrix& x, const std::vector<index_t>& rows);

}  // namespace optsub
