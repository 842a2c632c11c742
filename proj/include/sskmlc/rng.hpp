/*
Counter-based random number generation (Philox 4x32-10).

Every Monte-Carlo trial, simulated frame and permutation draw owns an
independent substream addressed by (seed, domain, index). Results are
therefore bit-reproducible for a fixed seed regardless of how trials are
distributed over worker threads.
*/
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace sskmlc {

namespace detail {

inline constexpr std::uint32_t philox_m0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

// One block of Philox4x32, 10 rounds. Matches the Random123 test vectors.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key)
{
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(philox_m0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(philox_m1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
        key[0] += philox_w0;
        key[1] += philox_w1;
    }
    return ctr;
}

} // namespace detail

// Keeps independent uses of the same seed decorrelated.
enum class RngDomain : std::uint32_t {
    capacity = 1,
    construction = 2,
    frame = 3,
    interleaver = 4,
    test = 200,
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, RngDomain domain, std::uint64_t index)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          index_lo_(std::uint32_t(index)),
          index_hi_(std::uint32_t(index >> 32)),
          domain_(std::uint32_t(domain))
    {
    }

    std::uint32_t next_u32()
    {
        if (pos_ == 4) {
            block_ = detail::philox4x32({std::uint32_t(counter_), index_lo_, index_hi_, domain_},
                                        key_);
            ++counter_;
            pos_ = 0;
        }
        return block_[pos_++];
    }

    std::uint64_t next_u64()
    {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, n). Unbiased (rejection on the 32-bit range).
    std::uint32_t next_index(std::uint32_t n)
    {
        if ((n & (n - 1)) == 0) return next_u32() & (n - 1);
        const std::uint32_t limit = std::uint32_t(-n) % n; // 2^32 mod n
        std::uint64_t m;
        do {
            m = std::uint64_t(next_u32()) * n;
        } while (std::uint32_t(m) < limit);
        return std::uint32_t(m >> 32);
    }

    // Circularly-symmetric complex Gaussian, E|z|^2 == variance.
    std::complex<double> next_complex_normal(double variance)
    {
        // Box-Muller; u in (0, 1] so the log is finite.
        const double u = double((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double r = std::sqrt(-variance * std::log(u));
        const double theta = 2.0 * std::numbers::pi * next_double();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t index_lo_;
    std::uint32_t index_hi_;
    std::uint32_t domain_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;
};

} // namespace sskmlc
