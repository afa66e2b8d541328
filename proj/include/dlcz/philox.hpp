#pragma once

#include <array>
#include <cstdint>

// Counter-based random numbers.  Every draw is a pure function of
// (seed, trial, channel, block), so results are independent of evaluation
// order and thread count by construction.
namespace dlcz::rng {

namespace detail {

inline constexpr uint32_t mul_hi_a = 0xD2511F53u;
inline constexpr uint32_t mul_hi_b = 0xCD9E8D57u;
inline constexpr uint32_t weyl_a = 0x9E3779B9u;
inline constexpr uint32_t weyl_b = 0xBB67AE85u;

} // namespace detail

// One 10-round 4x32 block.  Matches the reference vectors of the original
// counter-based generator bit for bit.
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const uint64_t p0 = uint64_t(detail::mul_hi_a) * ctr[0];
        const uint64_t p1 = uint64_t(detail::mul_hi_b) * ctr[2];
        ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
               uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
        key[0] += detail::weyl_a;
        key[1] += detail::weyl_b;
    }
    return ctr;
}

// Maps a lane to (0, 1); offset by half a step so 0 and 1 are excluded.
inline double uniform01(uint32_t lane) {
    return (double(lane) + 0.5) * (1.0 / 4294967296.0);
}

// Maps a lane to an index in [0, k) by fixed-point multiply.
inline uint32_t pick_index(uint32_t lane, uint32_t k) {
    return uint32_t((uint64_t(lane) * k) >> 32);
}

// Channel value reserved for draws scoped to a whole trial rather than one
// of its channels.
inline constexpr uint32_t trial_scope_channel = 0xFFFFFFFFu;

class CounterRng {
  public:
    explicit CounterRng(uint64_t seed) : seed_(seed) {}

    // Four independent 32-bit lanes for the given coordinates.
    std::array<uint32_t, 4> draw(uint64_t trial, uint32_t channel,
                                 uint32_t block) const {
        return philox4x32({uint32_t(trial), uint32_t(trial >> 32), channel,
                           block},
                          {uint32_t(seed_), uint32_t(seed_ >> 32)});
    }

    // Exact threshold test: true iff lane < floor(p * 2^32).
    static bool bernoulli(uint32_t lane, double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uint64_t(lane) < uint64_t(p * 4294967296.0);
    }

    uint64_t seed() const { return seed_; }

  private:
    uint64_t seed_;
};

} // namespace dlcz::rng
