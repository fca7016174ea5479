#pragma once

#include <array>
#include <cstdint>

namespace pruitt {

// Philox4x32-10 block function (Salmon et al. counter-based generator).
// Exposed for the known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& ctr,
                                           const std::array<std::uint32_t, 2>& key);

// One reproducible random stream, identified by (seed, stream). Streams with
// distinct ids never overlap: the stream id occupies the upper half of the
// 128-bit Philox counter, the draw counter the lower half. Identical
// (seed, stream, position) yields identical output on every platform and
// for every worker layout.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on [0,1) with 53 random bits.
    double next_unit();

    // Standard normal via Box-Muller; the paired value is cached.
    double next_gaussian();

    // Uniform on {0, ..., bound-1}, unbiased (rejection).
    std::uint64_t next_below(std::uint64_t bound);

    // Rademacher sign.
    double next_sign() { return (next_u32() & 1u) ? 1.0 : -1.0; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::array<std::uint32_t, 2> key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pruitt
