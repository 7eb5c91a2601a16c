#pragma once

#include <array>
#include <cstdint>

namespace revdiff {

/// One application of the Philox4x32-10 block function: 128 counter bits and
/// 64 key bits in, 128 pseudo-random bits out. Stateless, so any draw can be
/// produced in any order on any thread with identical results.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Addressed random stream on top of the block function. Each variate is
/// identified by (walker, purpose, draw); the seed becomes the cipher key.
/// Nothing is cached or advanced, which is what makes multi-threaded walks
/// bit-reproducible: the schedule of evaluation cannot matter.
class CounterRng {
public:
    enum class Purpose : std::uint32_t {
        init = 0,       // initial-position sampling
        step_noise = 1, // per-step diffusion noise
    };

    explicit CounterRng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Uniform double in the open interval (0, 1), 53 usable bits, never an
    /// endpoint (safe under log and inverse-CDF lookups).
    double uniform(std::uint64_t walker, Purpose purpose, std::uint32_t draw) const;

    /// Independent standard-normal pair from one block via Box-Muller.
    std::array<double, 2> gaussian_pair(std::uint64_t walker, Purpose purpose,
                                        std::uint32_t draw) const;

private:
    std::array<std::uint32_t, 4> block(std::uint64_t walker, Purpose purpose,
                                       std::uint32_t draw) const;
    std::uint64_t seed_;
    std::array<std::uint32_t, 2> key_;
};

} // namespace revdiff
