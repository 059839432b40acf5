#pragma once

#include <cstddef>
#include <string>

namespace optsub::kernels {

// Inner loops of the selection pipeline. Each kernel has a scalar
// reference implementation and an AVX2+FMA variant; the active table is
// picked once at startup from CPUID and can be overridden for testing.
//
// All kernels operate on a row-major block of `rows` vectors of length `d`.

// out[i] = sum_j (x[i][j] - mean[j])^2 * inv_var[j]
using diag_distance_fn = void (*)(const double* data, std::size_t rows, std::size_t d,
                                  const double* mean, const double* inv_var, double* out);

// Compound-symmetry Mahalanobis distance via the rank-one inverse:
//   out[i] = a * (||c||^2 - b * (sum_j c_j)^2),  c = x_i - mean,
// with a = 1/(1-rho), b = rho/(1-rho+d*rho).
using cs_distance_fn = void (*)(const double* data, std::size_t rows, std::size_t d,
                                const double* mean, double a, double b, double* out);

// General Mahalanobis distance: forward-substitute L z = (x - mean) per
// row and accumulate ||z||^2. `lower` is the d x d row-major Cholesky
// factor; `inv_diag[i]` = 1/lower[i][i].
using tri_distance_fn = void (*)(const double* data, std::size_t rows, std::size_t d,
                                 const double* mean, const double* lower,
                                 const double* inv_diag, double* out);

// Column sums of the block: sums[j] += sum_i x[i][j].
using col_sum_fn = void (*)(const double* data, std::size_t rows, std::size_t d,
                            double* sums);

// Upper-triangular accumulation of centered cross products:
//   m2[j*d+k] += sum_i (x[i][j]-center[j]) * (x[i][k]-center[k]),  k >= j.
// `scratch` must hold at least d doubles.
using centered_gram_fn = void (*)(const double* data, std::size_t rows, std::size_t d,
                                  const double* center, double* m2, double* scratch);

struct KernelTable {
    const char* name;
    diag_distance_fn diag_distance;
    cs_distance_fn cs_distance;
    tri_distance_fn tri_distance;
    col_sum_fn col_sum;
    centered_gram_fn centered_gram;
};

const KernelTable& scalar_table();
bool avx2_available();
const KernelTable* avx2_table();  // null when unsupported at build or run time

// Active table used by the library. Selection honours the
// OPTSUB_KERNELS environment variable ("scalar" or "avx2") on first use.
const KernelTable& active();
void force(const std::string& name);  // "scalar", "avx2", or "auto"

}  // namespace optsub::kernels
