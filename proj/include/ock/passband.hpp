#pragma once

// Carrier up/down conversion between the complex baseband rate fs and a real
// passband at fs_pb = I * fs.
//
// The baseband block is treated as one period of a band-limited sequence
// whose spectrum lives in the Nyquist zone [c - fs/2, c + fs/2), c being the
// centre of the chirp band. Interpolation and decimation move DFT bins
// between the two rates, which makes the round trip exact up to rounding.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ock/errors.hpp"
#include "ock/types.hpp"
#include "ock/waveform.hpp"

namespace ock {

struct PassbandSpec {
    double baseband_rate_hz = 100e3;
    unsigned interpolation = 4;
    double carrier_hz = 100e3;
    double band_center_hz = 0.0;  // centre of the baseband Nyquist zone

    double passband_rate_hz() const { return baseband_rate_hz * interpolation; }

    static PassbandSpec for_params(const ChirpParams& p, unsigned interpolation = 4) {
        PassbandSpec s;
        s.baseband_rate_hz = p.sample_rate_hz;
        s.interpolation = interpolation;
        s.carrier_hz = p.carrier_hz;
        s.band_center_hz = 0.5 * (p.initial_frequency_hz + p.highest_frequency_hz());
        return s;
    }

    void validate() const {
        if (!(baseband_rate_hz > 0.0)) throw ConfigError("passband: baseband rate must be positive");
        if (interpolation < 2) throw ConfigError("passband: interpolation factor must be >= 2");
        const double zone_lo = carrier_hz + band_center_hz - 0.5 * baseband_rate_hz;
        const double zone_hi = carrier_hz + band_center_hz + 0.5 * baseband_rate_hz;
        if (zone_lo < 0.0 || 2.0 * zone_hi > passband_rate_hz()) {
            std::ostringstream msg;
            msg << "passband: carrier " << carrier_hz << " Hz puts the signal zone at [" << zone_lo << ", "
                << zone_hi << "] Hz, which does not fit below the passband Nyquist frequency "
                << 0.5 * passband_rate_hz() << " Hz";
            throw ConfigError(msg.str());
        }
    }
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(n, 1)); }

// Index of baseband bin k inside an upsampled spectrum of size n_up, with the
// bin frequency folded into the half-open zone around `center_hz`.
inline std::size_t zone_bin(std::size_t k, std::size_t n_bb, std::size_t n_up, double fs, double center_hz) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n_bb);
    const double zone_lo = center_hz - 0.5 * fs;
    const auto wraps = static_cast<long long>(std::ceil((zone_lo - f) / fs));
    const long long shifted = static_cast<long long>(k) + wraps * static_cast<long long>(n_bb);
    const auto m = static_cast<long long>(n_up);
    return static_cast<std::size_t>(((shifted % m) + m) % m);
}

} // namespace detail

// Real passband signal, sqrt(2) Re(x_up(t) exp(j 2 pi fc t)). Output length is
// I times the baseband length rounded up to a power of two; the tail carries
// the interpolated padding.
inline std::vector<double> upconvert(std::span<const Complex> baseband, const PassbandSpec& spec) {
    spec.validate();
    if (baseband.empty()) return {};
    const std::size_t n_bb = detail::next_pow2(baseband.size());
    const std::size_t n_up = n_bb * spec.interpolation;

    ComplexVector padded(baseband.begin(), baseband.end());
    padded.resize(n_bb, Complex{});
    Eigen::FFT<double> fft;
    ComplexVector spectrum;
    fft.fwd(spectrum, padded);

    ComplexVector up_spectrum(n_up, Complex{});
    const double gain = static_cast<double>(spec.interpolation);
    for (std::size_t k = 0; k < n_bb; ++k)
        up_spectrum[detail::zone_bin(k, n_bb, n_up, spec.baseband_rate_hz, spec.band_center_hz)] = gain * spectrum[k];
    ComplexVector up;
    fft.inv(up, up_spectrum);

    std::vector<double> out(n_up);
    const double w = 2.0 * kPi * spec.carrier_hz / spec.passband_rate_hz();
    for (std::size_t n = 0; n < n_up; ++n)
        out[n] = std::sqrt(2.0) * (up[n] * std::polar(1.0, w * static_cast<double>(n))).real();
    return out;
}

// Inverse of upconvert. Returns ceil(len / I) rounded up to a power of two
// baseband samples.
inline ComplexVector downconvert(std::span<const double> passband, const PassbandSpec& spec) {
    spec.validate();
    if (passband.empty()) return {};
    const std::size_t n_bb = detail::next_pow2((passband.size() + spec.interpolation - 1) / spec.interpolation);
    const std::size_t n_up = n_bb * spec.interpolation;

    ComplexVector mixed(n_up, Complex{});
    const double w = 2.0 * kPi * spec.carrier_hz / spec.passband_rate_hz();
    for (std::size_t n = 0; n < passband.size(); ++n)
        mixed[n] = std::sqrt(2.0) * passband[n] * std::polar(1.0, -w * static_cast<double>(n));

    Eigen::FFT<double> fft;
    ComplexVector spectrum;
    fft.fwd(spectrum, mixed);
    ComplexVector bb_spectrum(n_bb);
    const double gain = 1.0 / static_cast<double>(spec.interpolation);
    for (std::size_t k = 0; k < n_bb; ++k)
        bb_spectrum[k] = gain * spectrum[detail::zone_bin(k, n_bb, n_up, spec.baseband_rate_hz, spec.band_center_hz)];
    ComplexVector out;
    fft.inv(out, bb_spectrum);
    return out;
}

} // namespace ock
