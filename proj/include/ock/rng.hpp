#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ock/types.hpp"

namespace ock {

// SplitMix64 finalizer. Used to derive independent per-trial seeds from a
// base seed and a trial counter so results do not depend on scheduling.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(mix_seed(mix_seed(base) ^ a) ^ b);
}

// Reproducible generator. The engine is mt19937_64, whose output sequence is
// fixed by the C++ standard; the uniform and Gaussian transforms are done here
// rather than with <random> distributions, which are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // 53-bit uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Circularly symmetric complex Gaussian with E|z|^2 = variance, i.e.
    // variance/2 per real dimension. Box-Muller: |z|^2 is exponential with
    // mean `variance`, the phase is uniform.
    Complex complex_gaussian(double variance) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-variance * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    Bits bits(std::size_t count) {
        Bits out(count);
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < count; ++i) {
            if (i % 64 == 0) word = engine_();
            out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ock
