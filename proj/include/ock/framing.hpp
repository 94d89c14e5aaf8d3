#pragma once

// Packet assembly: [PN training | guard | N chirp symbols], all at the complex
// baseband rate. PN chips are one sample each with unit energy.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ock/errors.hpp"
#include "ock/types.hpp"
#include "ock/waveform.hpp"

namespace ock {

// Feedback taps (1-based register stages) of primitive polynomials, one per
// register length 2..16. Each generates a maximal-length sequence of period
// 2^n - 1.
inline constexpr std::array<std::array<unsigned, 4>, 15> kPrimitiveTaps = {{
    {2, 1, 0, 0},     {3, 2, 0, 0},    {4, 3, 0, 0},     {5, 3, 0, 0},   {6, 5, 0, 0},
    {7, 6, 0, 0},     {8, 6, 5, 4},    {9, 5, 0, 0},     {10, 7, 0, 0},  {11, 9, 0, 0},
    {12, 6, 4, 1},    {13, 4, 3, 1},   {14, 5, 3, 1},    {15, 14, 0, 0}, {16, 15, 13, 4},
}};

// Raw 0/1 output of a Fibonacci LFSR of the given degree.
inline std::vector<std::uint8_t> lfsr_bits(unsigned degree, std::size_t length, std::uint32_t seed) {
    if (degree < 2 || degree > 16) throw ConfigError("lfsr degree must be in [2, 16]");
    const std::uint32_t mask = (1U << degree) - 1U;
    std::uint32_t state = seed & mask;
    if (state == 0) throw ConfigError("lfsr seed must be non-zero in the low register bits");
    const auto& taps = kPrimitiveTaps[degree - 2];
    std::vector<std::uint8_t> out(length);
    for (std::size_t i = 0; i < length; ++i) {
        out[i] = static_cast<std::uint8_t>(state & 1U);
        std::uint32_t fb = 0;
        for (unsigned t : taps)
            if (t != 0) fb ^= (state >> (degree - t)) & 1U;
        state = (state >> 1) | (fb << (degree - 1));
    }
    return out;
}

// Antipodal PN training sequence: an m-sequence of the smallest degree whose
// period covers `length`, truncated. Bit 0 maps to +1, bit 1 to -1.
inline std::vector<int> pn_sequence(std::size_t length, std::uint32_t seed = 1) {
    if (length == 0) throw ConfigError("PN length must be >= 1");
    unsigned degree = 2;
    while (degree < 16 && ((std::size_t{1} << degree) - 1) < length) ++degree;
    if (((std::size_t{1} << degree) - 1) < length) throw ConfigError("PN length too long (max 65535)");
    const auto raw = lfsr_bits(degree, length, seed);
    std::vector<int> pn(length);
    for (std::size_t i = 0; i < length; ++i) pn[i] = raw[i] ? -1 : 1;
    return pn;
}

struct FrameLayout {
    std::vector<int> pn;
    std::size_t guard_samples = 0;
    std::size_t symbols = 0;
    double symbol_energy = 1.0;

    std::size_t header_samples() const { return pn.size() + guard_samples; }
    std::size_t total_samples(std::size_t samples_per_symbol) const {
        return header_samples() + symbols * samples_per_symbol;
    }

    void validate() const {
        if (pn.empty()) throw ConfigError("frame: PN training must have at least one chip");
        for (int c : pn)
            if (c != 1 && c != -1) throw ConfigError("frame: PN chips must be +1 or -1");
        if (!(symbol_energy > 0.0)) throw ConfigError("frame: symbol energy must be positive");
    }
};

// Layout from physical quantities. Guard duration must land on the sample grid.
inline FrameLayout make_layout(const ChirpParams& params, std::size_t pn_length, std::uint32_t pn_seed,
                               double guard_s, std::size_t symbols, double symbol_energy) {
    const double guard = guard_s * params.sample_rate_hz;
    if (guard < 0.0 || !detail::near_integer(guard))
        throw ConfigError("frame: guard duration must be a non-negative whole number of samples");
    FrameLayout layout{pn_sequence(pn_length, pn_seed), static_cast<std::size_t>(std::llround(guard)),
                       symbols, symbol_energy};
    layout.validate();
    return layout;
}

struct Packet {
    Bits payload_bits;
    std::vector<unsigned> symbol_indices;
    ComplexVector baseband;
};

inline std::vector<unsigned> bits_to_symbols(std::span<const std::uint8_t> bits, const ChirpBank& bank) {
    const unsigned k = bank.bits_per_symbol();
    if (bits.size() % k != 0) throw ConfigError("bit count is not a multiple of bits per symbol");
    std::vector<unsigned> out(bits.size() / k);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = bank.index_of(bits.subspan(n * k, k));
    return out;
}

inline Bits symbols_to_bits(std::span<const unsigned> symbols, const ChirpBank& bank) {
    Bits out;
    out.reserve(symbols.size() * bank.bits_per_symbol());
    for (unsigned m : symbols) {
        const auto label = bank.label(m);
        out.insert(out.end(), label.begin(), label.end());
    }
    return out;
}

inline Packet modulate(std::span<const std::uint8_t> bits, const ChirpBank& bank, const FrameLayout& layout) {
    layout.validate();
    const std::size_t expected = layout.symbols * bank.bits_per_symbol();
    if (bits.size() != expected)
        throw ConfigError("modulate: expected " + std::to_string(expected) + " payload bits, got " +
                          std::to_string(bits.size()));

    Packet pkt;
    pkt.payload_bits.assign(bits.begin(), bits.end());
    pkt.symbol_indices = bits_to_symbols(bits, bank);

    const std::size_t L = bank.samples_per_symbol();
    pkt.baseband.assign(layout.total_samples(L), Complex{});
    for (std::size_t i = 0; i < layout.pn.size(); ++i) pkt.baseband[i] = static_cast<double>(layout.pn[i]);

    const double amplitude = std::sqrt(layout.symbol_energy);
    auto out = pkt.baseband.begin() + static_cast<std::ptrdiff_t>(layout.header_samples());
    for (unsigned m : pkt.symbol_indices)
        for (const Complex& s : bank.waveform(m)) *out++ = amplitude * s;
    return pkt;
}

} // namespace ock
