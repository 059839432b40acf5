#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "optsub/kernels.hpp"
#include "optsub/linalg.hpp"
#include "optsub/rng.hpp"

using namespace optsub;

namespace {

std::vector<double> random_vec(std::size_t n, RngStream& rng, double lo = -2.0,
                               double hi = 2.0) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * rng.next_double();
    return v;
}

// dense SPD matrix: A A^T + d I
std::vector<double> random_spd(std::size_t d, RngStream& rng) {
    std::vector<double> a = random_vec(d * d, rng, -1.0, 1.0);
    std::vector<double> s(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = (i == j) ? static_cast<double>(d) : 0.0;
            for (std::size_t m = 0; m < d; ++m) acc += a[i * d + m] * a[j * d + m];
            s[i * d + j] = acc;
        }
    return s;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
        CHECK(std::abs(a[i] - b[i]) <= tol * scale);
    }
}

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
    const kernels::KernelTable* avx2 = kernels::avx2_table();
    if (!avx2) {
        MESSAGE("avx2 unavailable; equivalence not testable on this host");
        return;
    }
    const kernels::KernelTable& scalar = kernels::scalar_table();
    RngStream rng(99, 0);

    for (std::size_t d : {1u, 3u, 4u, 7u, 16u, 50u}) {
        const std::size_t rows = 257;  // forces a tail in the 4-row batches
        const std::vector<double> data = random_vec(rows * d, rng);
        const std::vector<double> mean = random_vec(d, rng);

        {
            std::vector<double> inv_var = random_vec(d, rng, 0.5, 2.0);
            std::vector<double> a(rows), b(rows);
            scalar.diag_distance(data.data(), rows, d, mean.data(), inv_var.data(), a.data());
            avx2->diag_distance(data.data(), rows, d, mean.data(), inv_var.data(), b.data());
            check_close(a, b, 1e-12);
        }
        {
            std::vector<double> a(rows), b(rows);
            scalar.cs_distance(data.data(), rows, d, mean.data(), 2.0, 0.009, a.data());
            avx2->cs_distance(data.data(), rows, d, mean.data(), 2.0, 0.009, b.data());
            check_close(a, b, 1e-12);
        }
        {
            const std::vector<double> spd = random_spd(d, rng);
            const CholFactor chol = cholesky(spd, d);
            std::vector<double> inv_diag(d);
            for (std::size_t j = 0; j < d; ++j) inv_diag[j] = 1.0 / chol.at(j, j);
            std::vector<double> a(rows), b(rows);
            scalar.tri_distance(data.data(), rows, d, mean.data(), chol.lower.data(),
                                inv_diag.data(), a.data());
            avx2->tri_distance(data.data(), rows, d, mean.data(), chol.lower.data(),
                               inv_diag.data(), b.data());
            check_close(a, b, 1e-11);
        }
        {
            std::vector<double> a(d, 0.0), b(d, 0.0);
            scalar.col_sum(data.data(), rows, d, a.data());
            avx2->col_sum(data.data(), rows, d, b.data());
            check_close(a, b, 1e-12);
        }
        {
            std::vector<double> a(d * d, 0.0), b(d * d, 0.0), sa(d), sb(d);
            scalar.centered_gram(data.data(), rows, d, mean.data(), a.data(), sa.data());
            avx2->centered_gram(data.data(), rows, d, mean.data(), b.data(), sb.data());
            check_close(a, b, 1e-11);
        }
    }
}

TEST_CASE("tri_distance equals the dense quadratic form") {
    RngStream rng(100, 0);
    const std::size_t d = 6, rows = 40;
    const std::vector<double> data = random_vec(rows * d, rng);
    const std::vector<double> mean = random_vec(d, rng);
    const std::vector<double> spd = random_spd(d, rng);
    const CholFactor chol = cholesky(spd, d);
    const std::vector<double> inv = cholesky_inverse(chol);

    std::vector<double> inv_diag(d);
    for (std::size_t j = 0; j < d; ++j) inv_diag[j] = 1.0 / chol.at(j, j);
    std::vector<double> got(rows);
    kernels::active().tri_distance(data.data(), rows, d, mean.data(), chol.lower.data(),
                                   inv_diag.data(), got.data());

    for (std::size_t i = 0; i < rows; ++i) {
        double want = 0.0;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                want += (data[i * d + a] - mean[a]) * inv[a * d + b] *
                        (data[i * d + b] - mean[b]);
        CHECK(got[i] == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("kernel table can be forced") {
    kernels::force("scalar");
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::force("auto");
    if (kernels::avx2_available()) CHECK(std::string(kernels::active().name) == "avx2");
}
