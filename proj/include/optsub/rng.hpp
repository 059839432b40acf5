#pragma once

#include <array>
#include <cstdint>

namespace optsub {

/// Counter-based random stream (Philox-4x64 with 10 rounds). A stream is
/// a value type: copying it forks the exact sequence position, and
/// (seed, stream_id) fully determine the output. Distinct stream ids give
/// independent streams, so replicate r can simply own stream_id = r.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double next_double();

    /// Uniform on (0, 1]; safe to pass to log().
    double next_double_pos();

    /// Uniform integer on [0, bound), bound >= 1. Debiased by rejection.
    std::uint64_t next_below(std::uint64_t bound);

    /// Standard normal via Box-Muller (pairs generated, one cached).
    double next_normal();

    /// Gamma(shape, scale=1), shape > 0. Marsaglia-Tsang squeeze.
    double next_gamma(double shape);

    /// Chi-square with df > 0 degrees of freedom (df need not be integer).
    double next_chi2(double df) { return 2.0 * next_gamma(0.5 * df); }

private:
    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::array<std::uint64_t, 4> counter_{};
    std::array<std::uint64_t, 4> block_{};
    int block_pos_ = 4;  // empty
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace optsub
