#pragma once

#include <array>
#include <cstdint>

namespace smpr {

/// Philox 4x32-10 counter-based generator. A draw is a pure function of
/// (seed, path, step), so parallel simulation never changes the stream.
namespace philox {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

inline std::array<uint32_t, 4> block(uint64_t seed, uint64_t path, uint64_t step) {
    constexpr uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    std::array<uint32_t, 4> x = {static_cast<uint32_t>(path), static_cast<uint32_t>(path >> 32),
                                 static_cast<uint32_t>(step), static_cast<uint32_t>(step >> 32)};
    uint32_t k0 = static_cast<uint32_t>(seed);
    uint32_t k1 = static_cast<uint32_t>(seed >> 32);
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, x[0], hi0, lo0);
        mulhilo(kM1, x[2], hi1, lo1);
        x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
        k0 += kW0;
        k1 += kW1;
    }
    return x;
}

/// Uniform draw strictly inside (0, 1).
inline double uniform(uint64_t seed, uint64_t path, uint64_t step) {
    const auto b = block(seed, path, step);
    const uint64_t bits = (static_cast<uint64_t>(b[0]) << 32) | b[1];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace philox

}  // namespace smpr
