#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "optsub/rng.hpp"

using optsub::RngStream;

TEST_CASE("philox known-answer vectors") {
    // expected outputs generated with numpy.random.Philox (4x64, 10 rounds)
    RngStream zero(0, 0);
    CHECK(zero.next_u64() == 0x02f4ba6408e4d89bull);
    CHECK(zero.next_u64() == 0x3dd62b0b9ca8c5b2ull);
    CHECK(zero.next_u64() == 0x1c8667a55d902e79ull);
    CHECK(zero.next_u64() == 0x907d7a052fd5b4dcull);
    // second block: counter word 0 bumped to 1
    CHECK(zero.next_u64() == 0x809bf322883987c3ull);
    CHECK(zero.next_u64() == 0x471128b9e807f7ddull);

    RngStream keyed(0x123456789abcdef0ull, 0);
    CHECK(keyed.next_u64() == 0x6cbbf974e52b24dcull);
    CHECK(keyed.next_u64() == 0xf7b1843d1e4fd656ull);

    RngStream two_words(0x0123456789abcdefull, 0xfedcba9876543210ull);
    CHECK(two_words.next_u64() == 0x2d2e7c09c193c5faull);
    CHECK(two_words.next_u64() == 0xd56c6aa2d11f06aaull);
    CHECK(two_words.next_u64() == 0x184fcdf7f5474a23ull);
    CHECK(two_words.next_u64() == 0x367832d087008054ull);
    CHECK(two_words.next_u64() == 0x56ffd4cf84d16286ull);
}

TEST_CASE("streams reproduce and differ") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42, 8);
    int same = 0;
    RngStream a2(42, 7);
    for (int i = 0; i < 64; ++i)
        if (a2.next_u64() == c.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("doubles live in the unit interval") {
    RngStream rng(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng.next_double_pos();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("next_below is unbiased over small ranges") {
    RngStream rng(3, 0);
    std::vector<int> counts(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[rng.next_below(10)];
    for (int c : counts) {
        // 5 sigma around draws/10
        CHECK(c > 10000 - 5 * 95);
        CHECK(c < 10000 + 5 * 95);
    }
}

TEST_CASE("normal moments") {
    RngStream rng(11, 0);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0, sum3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sumsq += z * z;
        sum3 += z * z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sumsq / n - 1.0) < 0.02);
    CHECK(std::abs(sum3 / n) < 0.05);
}

TEST_CASE("gamma matches mean and variance") {
    RngStream rng(12, 0);
    for (double shape : {0.5, 1.0, 1.5, 5.0, 25.0}) {
        const int n = 100000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double g = rng.next_gamma(shape);
            sum += g;
            sumsq += g * g;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        CHECK(mean == doctest::Approx(shape).epsilon(0.03));
        CHECK(var == doctest::Approx(shape).epsilon(0.08));
    }
}
