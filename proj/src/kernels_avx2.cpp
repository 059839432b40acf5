// AVX2+FMA variants of the distance and moment kernels. This translation
// unit is compiled with -mavx2 -mfma; nothing here may be called unless
// avx2_available() returned true.

#include "optsub/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <vector>

namespace optsub::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void diag_distance_avx2(const double* data, std::size_t rows, std::size_t d,
                        const double* mean, const double* inv_var, double* out) {
    const std::size_t dv = d & ~std::size_t(3);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j < dv; j += 4) {
            __m256d c = _mm256_sub_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(mean + j));
            __m256d cw = _mm256_mul_pd(c, _mm256_loadu_pd(inv_var + j));
            acc = _mm256_fmadd_pd(c, cw, acc);
        }
        double tail = 0.0;
        for (; j < d; ++j) {
            const double c = x[j] - mean[j];
            tail += c * c * inv_var[j];
        }
        out[i] = hsum(acc) + tail;
    }
}

void cs_distance_avx2(const double* data, std::size_t rows, std::size_t d,
                      const double* mean, double a, double b, double* out) {
    const std::size_t dv = d & ~std::size_t(3);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        __m256d accsq = _mm256_setzero_pd();
        __m256d accs = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j < dv; j += 4) {
            __m256d c = _mm256_sub_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(mean + j));
            accsq = _mm256_fmadd_pd(c, c, accsq);
            accs = _mm256_add_pd(accs, c);
        }
        double sumsq = hsum(accsq);
        double sum = hsum(accs);
        for (; j < d; ++j) {
            const double c = x[j] - mean[j];
            sumsq += c * c;
            sum += c;
        }
        out[i] = a * (sumsq - b * sum * sum);
    }
}

// Forward substitution over four rows at once: z[j] holds one lane per row.
void tri_distance_avx2(const double* data, std::size_t rows, std::size_t d,
                       const double* mean, const double* lower,
                       const double* inv_diag, double* out) {
    thread_local std::vector<double> zbuf;
    zbuf.resize(4 * d);
    double* z = zbuf.data();

    std::size_t i = 0;
    for (; i + 4 <= rows; i += 4) {
        const double* r0 = data + (i + 0) * d;
        const double* r1 = data + (i + 1) * d;
        const double* r2 = data + (i + 2) * d;
        const double* r3 = data + (i + 3) * d;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < d; ++j) {
            __m256d s = _mm256_sub_pd(_mm256_set_pd(r3[j], r2[j], r1[j], r0[j]),
                                      _mm256_set1_pd(mean[j]));
            const double* lrow = lower + j * d;
            for (std::size_t m = 0; m < j; ++m)
                s = _mm256_fnmadd_pd(_mm256_set1_pd(lrow[m]), _mm256_loadu_pd(z + 4 * m), s);
            __m256d zj = _mm256_mul_pd(s, _mm256_set1_pd(inv_diag[j]));
            _mm256_storeu_pd(z + 4 * j, zj);
            acc = _mm256_fmadd_pd(zj, zj, acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    // tail rows, one at a time
    thread_local std::vector<double> zs;
    zs.resize(d);
    for (; i < rows; ++i) {
        const double* x = data + i * d;
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double s = x[j] - mean[j];
            const double* lrow = lower + j * d;
            for (std::size_t m = 0; m < j; ++m) s -= lrow[m] * zs[m];
            const double zj = s * inv_diag[j];
            zs[j] = zj;
            acc += zj * zj;
        }
        out[i] = acc;
    }
}

void col_sum_avx2(const double* data, std::size_t rows, std::size_t d, double* sums) {
    const std::size_t dv = d & ~std::size_t(3);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        std::size_t j = 0;
        for (; j < dv; j += 4) {
            __m256d s = _mm256_add_pd(_mm256_loadu_pd(sums + j), _mm256_loadu_pd(x + j));
            _mm256_storeu_pd(sums + j, s);
        }
        for (; j < d; ++j) sums[j] += x[j];
    }
}

void centered_gram_avx2(const double* data, std::size_t rows, std::size_t d,
                        const double* center, double* m2, double* scratch) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* x = data + i * d;
        for (std::size_t j = 0; j < d; ++j) scratch[j] = x[j] - center[j];
        for (std::size_t j = 0; j < d; ++j) {
            const __m256d cj = _mm256_set1_pd(scratch[j]);
            double* m2row = m2 + j * d;
            std::size_t k = j;
            for (; k + 4 <= d; k += 4) {
                __m256d v = _mm256_fmadd_pd(cj, _mm256_loadu_pd(scratch + k),
                                            _mm256_loadu_pd(m2row + k));
                _mm256_storeu_pd(m2row + k, v);
            }
            for (; k < d; ++k) m2row[k] += scratch[j] * scratch[k];
        }
    }
}

const KernelTable avx2_table_impl{
    "avx2",            diag_distance_avx2, cs_distance_avx2,
    tri_distance_avx2, col_sum_avx2,       centered_gram_avx2,
};

}  // namespace

const KernelTable* avx2_table() {
    return avx2_available() ? &avx2_table_impl : nullptr;
}

}  // namespace optsub::kernels

#else

namespace optsub::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace optsub::kernels

#endif
