#include "optsub/kernels.hpp"

#include <vector>

namespace optsub::kernels {
namespace {

void diag_distance_scalar(const double* data, std::size_t rows, std::size_t d,
                          const double* mean, const double* inv_var, double* out) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = x[j] - mean[j];
            acc += c * c * inv_var[j];
        }
        out[i] = acc;
    }
}

void cs_distance_scalar(const double* data, std::size_t rows, std::size_t d,
                        const double* mean, double a, double b, double* out) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        double sumsq = 0.0;
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = x[j] - mean[j];
            sumsq += c * c;
            sum += c;
        }
        out[i] = a * (sumsq - b * sum * sum);
    }
}

void tri_distance_scalar(const double* data, std::size_t rows, std::size_t d,
                         const double* mean, const double* lower,
                         const double* inv_diag, double* out) {
    // z (length d) is the forward-substitution workspace; per-row cost O(d^2).
    thread_local std::vector<double> z;
    z.resize(d);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double s = x[j] - mean[j];
            const double* lrow = lower + j * d;
            for (std::size_t m = 0; m < j; ++m) s -= lrow[m] * z[m];
            const double zj = s * inv_diag[j];
            z[j] = zj;
            acc += zj * zj;
        }
        out[i] = acc;
    }
}

void col_sum_scalar(const double* data, std::size_t rows, std::size_t d, double* sums) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        for (std::size_t j = 0; j < d; ++j) sums[j] += x[j];
    }
}

void centered_gram_scalar(const double* data, std::size_t rows, std::size_t d,
                          const double* center, double* m2, double* scratch) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        for (std::size_t j = 0; j < d; ++j) scratch[j] = x[j] - center[j];
        for (std::size_t j = 0; j < d; ++j) {
            const double cj = scratch[j];
            double* m2row = m2 + j * d;
            for (std::size_t k = j; k < d; ++k) m2row[k] += cj * scratch[k];
        }
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar",          diag_distance_scalar, cs_distance_scalar,
        tri_distance_scalar, col_sum_scalar,     centered_gram_scalar,
    };
    return table;
}

}  // namespace optsub::kernels
