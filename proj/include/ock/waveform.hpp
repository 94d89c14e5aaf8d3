#pragma once

// M-ary orthogonal chirp bank.
//
// Symbol m is the linear up-chirp
//
//     psi_m[n] = exp(j(2 pi (f0 + m df) t + pi mu t^2)),  t = n / fs,  n in [0, L)
//
// normalized to unit discrete energy. Two chirps share the quadratic phase, so
// their inner product reduces to a geometric sum of exp(j 2 pi (k - l) df n / fs),
// which vanishes exactly when df * T is a non-zero integer and L = T * fs.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ock/errors.hpp"
#include "ock/types.hpp"

namespace ock {

namespace detail {

inline bool near_integer(double x, double tol = 1e-9) {
    return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

} // namespace detail

struct ChirpParams {
    unsigned modulation_order = 8;       // M
    double symbol_duration_s = 0.33e-3;  // T
    double initial_frequency_hz = 3050.0;
    double frequency_spacing_hz = 1.0 / 0.33e-3;
    double chirp_rate_hz_per_s = 9.31e6;  // mu
    double sample_rate_hz = 100e3;        // complex baseband rate
    double carrier_hz = 100e3;
    // Cleared only by the nominal profile, whose df * T is 1.0065.
    bool require_orthogonal = true;

    unsigned bits_per_symbol() const {
        return static_cast<unsigned>(std::countr_zero(modulation_order));
    }

    std::size_t samples_per_symbol() const {
        return static_cast<std::size_t>(std::llround(symbol_duration_s * sample_rate_hz));
    }

    double sweep_bandwidth_hz() const { return chirp_rate_hz_per_s * symbol_duration_s; }

    // Highest instantaneous frequency reached by any chirp in the bank.
    double highest_frequency_hz() const {
        return initial_frequency_hz + (modulation_order - 1) * frequency_spacing_hz +
               sweep_bandwidth_hz();
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError("chirp params: " + msg); };
        if (modulation_order < 2 || !std::has_single_bit(modulation_order))
            fail("modulation order must be a power of two >= 2");
        if (!(symbol_duration_s > 0.0) || !(sample_rate_hz > 0.0))
            fail("symbol duration and sample rate must be positive");
        if (!detail::near_integer(symbol_duration_s * sample_rate_hz))
            fail("symbol duration times sample rate must be an integer sample count");
        if (!(frequency_spacing_hz > 0.0)) fail("frequency spacing must be positive");
        if (require_orthogonal && !detail::near_integer(frequency_spacing_hz * symbol_duration_s))
            fail("frequency spacing times symbol duration must be an integer");
        if (initial_frequency_hz < 0.0) fail("initial frequency must be non-negative");
        if (chirp_rate_hz_per_s < 0.0) fail("only up-chirps (mu >= 0) are supported");
        if (highest_frequency_hz() > sample_rate_hz) {
            std::ostringstream msg;
            msg << "bank reaches " << highest_frequency_hz() << " Hz, above the complex baseband rate "
                << sample_rate_hz << " Hz";
            fail(msg.str());
        }
    }
};

// Profile with df snapped to exactly 1/T so the bank is orthogonal.
inline ChirpParams default_profile(unsigned modulation_order = 8) {
    ChirpParams p;
    p.modulation_order = modulation_order;
    return p;
}

// Keeps df = 3.05 kHz; adjacent chirps correlate at about 6.5e-3.
inline ChirpParams nominal_profile(unsigned modulation_order = 8) {
    ChirpParams p;
    p.modulation_order = modulation_order;
    p.frequency_spacing_hz = 3050.0;
    p.require_orthogonal = false;
    return p;
}

// Binary-reflected Gray code.
inline unsigned gray_code(unsigned m) { return m ^ (m >> 1); }

inline unsigned gray_inverse(unsigned g) {
    unsigned m = g;
    for (unsigned shift = 1; shift < 32; shift <<= 1) m ^= m >> shift;
    return m;
}

// Label of symbol m as `width` bits, most significant first.
inline Bits gray_encode(unsigned m, unsigned width) {
    if (width == 0 || width > 31 || m >= (1U << width))
        throw std::out_of_range("gray_encode: symbol index out of range");
    const unsigned g = gray_code(m);
    Bits out(width);
    for (unsigned i = 0; i < width; ++i) out[i] = static_cast<std::uint8_t>((g >> (width - 1 - i)) & 1U);
    return out;
}

inline unsigned gray_decode(std::span<const std::uint8_t> bits) {
    if (bits.empty() || bits.size() > 31) throw std::out_of_range("gray_decode: bad label width");
    unsigned g = 0;
    for (auto b : bits) {
        if (b > 1) throw std::out_of_range("gray_decode: bits must be 0 or 1");
        g = (g << 1) | b;
    }
    return gray_inverse(g);
}

class ChirpBank {
public:
    explicit ChirpBank(const ChirpParams& params) : params_(params) {
        params_.validate();
        const std::size_t L = params_.samples_per_symbol();
        const double fs = params_.sample_rate_hz;
        waveforms_.resize(params_.modulation_order, ComplexVector(L));
        for (unsigned m = 0; m < params_.modulation_order; ++m) {
            const double f = params_.initial_frequency_hz + m * params_.frequency_spacing_hz;
            double energy = 0.0;
            for (std::size_t n = 0; n < L; ++n) {
                const double t = static_cast<double>(n) / fs;
                const double phase = 2.0 * kPi * f * t + kPi * params_.chirp_rate_hz_per_s * t * t;
                waveforms_[m][n] = std::polar(1.0, phase);
                energy += std::norm(waveforms_[m][n]);
            }
            const double scale = 1.0 / std::sqrt(energy);
            for (auto& s : waveforms_[m]) s *= scale;
        }
    }

    const ChirpParams& params() const { return params_; }
    unsigned size() const { return params_.modulation_order; }
    unsigned bits_per_symbol() const { return params_.bits_per_symbol(); }
    std::size_t samples_per_symbol() const { return params_.samples_per_symbol(); }

    std::span<const Complex> waveform(unsigned m) const {
        check_index(m);
        return waveforms_[m];
    }

    Bits label(unsigned m) const {
        check_index(m);
        return gray_encode(m, bits_per_symbol());
    }

    unsigned index_of(std::span<const std::uint8_t> label) const {
        if (label.size() != bits_per_symbol()) throw std::out_of_range("label width mismatch");
        return gray_decode(label);
    }

    // <psi_k, psi_l> = sum_n psi_k[n] conj(psi_l[n])
    Complex cross_correlation(unsigned k, unsigned l) const {
        check_index(k);
        check_index(l);
        Complex acc{};
        for (std::size_t n = 0; n < waveforms_[k].size(); ++n)
            acc += waveforms_[k][n] * std::conj(waveforms_[l][n]);
        return acc;
    }

    // Row-major M x M Gram matrix.
    std::vector<Complex> gram() const {
        const unsigned M = size();
        std::vector<Complex> g(static_cast<std::size_t>(M) * M);
        for (unsigned k = 0; k < M; ++k)
            for (unsigned l = 0; l < M; ++l) g[k * M + l] = cross_correlation(k, l);
        return g;
    }

    double max_cross_correlation() const {
        double worst = 0.0;
        for (unsigned k = 0; k < size(); ++k)
            for (unsigned l = 0; l < size(); ++l)
                if (k != l) worst = std::max(worst, std::abs(cross_correlation(k, l)));
        return worst;
    }

private:
    void check_index(unsigned m) const {
        if (m >= size()) throw std::out_of_range("chirp index out of range");
    }

    ChirpParams params_;
    std::vector<ComplexVector> waveforms_;
};

inline ChirpBank build_bank(const ChirpParams& params) { return ChirpBank(params); }

} // namespace ock
