#include "revdiff/rng.hpp"

#include <cmath>

namespace revdiff {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}

// 53-bit uniform strictly inside (0, 1): top bits of two words plus a half-ulp
// offset so 0 is unreachable.
inline double to_open_unit(std::uint32_t w0, std::uint32_t w1) {
    const double mantissa = double(w0 >> 5) * 67108864.0 + double(w1 >> 6);
    return (mantissa + 0.5) * (1.0 / 9007199254740992.0);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mul_hi_lo(kMul0, counter[0], hi0, lo0);
        mul_hi_lo(kMul1, counter[2], hi1, lo1);
        counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    }
    return counter;
}

CounterRng::CounterRng(std::uint64_t seed)
    : seed_(seed), key_{std::uint32_t(seed), std::uint32_t(seed >> 32)} {}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t walker, Purpose purpose,
                                               std::uint32_t draw) const {
    const std::array<std::uint32_t, 4> counter = {
        draw,
        static_cast<std::uint32_t>(purpose),
        std::uint32_t(walker),
        std::uint32_t(walker >> 32),
    };
    return philox4x32(counter, key_);
}

double CounterRng::uniform(std::uint64_t walker, Purpose purpose, std::uint32_t draw) const {
    const auto w = block(walker, purpose, draw);
    return to_open_unit(w[0], w[1]);
}

std::array<double, 2> CounterRng::gaussian_pair(std::uint64_t walker, Purpose purpose,
                                                std::uint32_t draw) const {
    const auto w = block(walker, purpose, draw);
    const double u1 = to_open_unit(w[0], w[1]);
    const double u2 = to_open_unit(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 2.0 * std::acos(-1.0);
    return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
}

} // namespace revdiff
