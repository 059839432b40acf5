#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "optsub/errors.hpp"

namespace optsub {

using index_t = std::size_t;

/// Full data set: n rows of d covariates, row-major, plus an optional
/// response column.
struct DataMatrix {
    index_t n = 0;
    index_t d = 0;
    std::vector<double> values;            // n*d, row-major
    std::optional<std::vector<double>> response;

    DataMatrix() = default;
    DataMatrix(index_t n_, index_t d_)
        : n(n_), d(d_), values(n_ * d_, 0.0) {}

    const double* row(index_t i) const { return values.data() + i * d; }
    double* row(index_t i) { return values.data() + i * d; }

    bool has_response() const { return response.has_value(); }

    void validate() const;
};

enum class CovStructure { General, CompoundSymmetry, Diagonal };

/// Location vector and dispersion matrix of the covariate distribution.
/// The structure tag unlocks the O(nd) distance paths.
struct CovSpec {
    std::vector<double> mean;        // length d
    std::vector<double> dispersion;  // d*d, row-major, symmetric PD
    CovStructure structure = CovStructure::General;
    double rho = 0.0;  // only meaningful for CompoundSymmetry

    index_t dim() const { return mean.size(); }

    static CovSpec identity(index_t d);
    static CovSpec compound_symmetry(index_t d, double rho);
    static CovSpec diagonal(std::vector<double> mean, std::vector<double> variances);
    static CovSpec general(std::vector<double> mean, std::vector<double> dispersion);

    /// Checks symmetry, the structure-tag invariants, and positive
    /// definiteness (via Cholesky). Throws on violation.
    void validate() const;
};

/// Lower-triangular Cholesky factor, L L^T = S.
struct CholFactor {
    index_t d = 0;
    std::vector<double> lower;  // d*d row-major, strict upper part zero

    double at(index_t i, index_t j) const { return lower[i * d + j]; }
};

}  // namespace optsub
