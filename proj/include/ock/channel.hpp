#pragma once

// Tapped-delay-line multipath channel on the baseband sample lattice
// (tap p at delay p samples) plus circular complex AWGN.

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ock/errors.hpp"
#include "ock/rng.hpp"
#include "ock/types.hpp"

namespace ock {

struct ChannelModel {
    // Energy-including complex gains; taps[0] is the first arrival.
    ComplexVector taps{Complex{1.0, 0.0}};

    std::size_t paths() const { return taps.size(); }

    double energy() const {
        double e = 0.0;
        for (const auto& h : taps) e += std::norm(h);
        return e;
    }

    void validate() const {
        if (taps.empty()) throw ConfigError("channel: at least one tap is required");
        if (taps.front() == Complex{}) throw ConfigError("channel: first tap must be non-zero");
    }
};

// Total complex noise variance per sample is n0 (n0 / 2 per real dimension).
struct NoiseSpec {
    double n0 = 0.0;
    std::uint64_t seed = 0;
};

inline ComplexVector apply_channel(std::span<const Complex> signal, const ChannelModel& ch, double n0, Rng& rng) {
    ch.validate();
    if (signal.empty()) throw ConfigError("apply_channel: empty signal");
    if (n0 < 0.0) throw ConfigError("apply_channel: negative noise level");
    const std::size_t P = ch.paths();
    ComplexVector out(signal.size() + P - 1, Complex{});
    for (std::size_t n = 0; n < signal.size(); ++n) {
        if (signal[n] == Complex{}) continue;
        for (std::size_t p = 0; p < P; ++p) out[n + p] += ch.taps[p] * signal[n];
    }
    if (n0 > 0.0)
        for (auto& s : out) s += rng.complex_gaussian(n0);
    return out;
}

inline ComplexVector apply_channel(std::span<const Complex> signal, const ChannelModel& ch, const NoiseSpec& noise) {
    Rng rng(noise.seed);
    return apply_channel(signal, ch, noise.n0, rng);
}

// Banded Toeplitz convolution matrix, (L + P - 1) x L, column j holding the
// taps starting at row j.
inline Eigen::MatrixXcd build_H(std::span<const Complex> taps, std::size_t L) {
    if (L == 0) throw ConfigError("build_H: L must be >= 1");
    const auto P = static_cast<Eigen::Index>(taps.size());
    const auto cols = static_cast<Eigen::Index>(L);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(cols + P - 1, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index p = 0; p < P; ++p) H(j + p, j) = taps[static_cast<std::size_t>(p)];
    return H;
}

inline Eigen::MatrixXcd build_H(const ChannelModel& ch, std::size_t L) { return build_H(ch.taps, L); }

struct ChannelProfile {
    enum class Kind { fixed, exp_rayleigh };

    Kind kind = Kind::fixed;
    ComplexVector taps{Complex{1.0, 0.0}};  // fixed profile only
    std::size_t paths = 1;                  // exp-rayleigh only
    double decay_paths = 1.0;               // power ~ exp(-p / decay_paths)

    static ChannelProfile identity() { return {}; }

    static ChannelProfile fixed(ComplexVector taps) {
        ChannelProfile p;
        p.taps = std::move(taps);
        p.paths = p.taps.size();
        return p;
    }

    static ChannelProfile exp_rayleigh(std::size_t paths, double decay_paths = 1.0) {
        ChannelProfile p;
        p.kind = Kind::exp_rayleigh;
        p.paths = paths;
        p.decay_paths = decay_paths;
        p.taps.clear();
        return p;
    }

    std::size_t path_count() const { return kind == Kind::fixed ? taps.size() : paths; }
};

inline ChannelProfile::Kind parse_channel_kind(const std::string& name) {
    if (name == "fixed" || name == "identity") return ChannelProfile::Kind::fixed;
    if (name == "exp-rayleigh") return ChannelProfile::Kind::exp_rayleigh;
    throw ConfigError("unknown channel profile '" + name + "' (expected identity, fixed or exp-rayleigh)");
}

inline std::string to_string(ChannelProfile::Kind kind) {
    return kind == ChannelProfile::Kind::fixed ? "fixed" : "exp-rayleigh";
}

// Draws one channel realization. exp-rayleigh: tap p is circular Gaussian
// with power exp(-p / decay), then the tap vector is scaled to unit energy.
inline ChannelModel sample_random_channel(const ChannelProfile& profile, std::uint64_t seed) {
    ChannelModel ch;
    switch (profile.kind) {
    case ChannelProfile::Kind::fixed:
        ch.taps = profile.taps;
        break;
    case ChannelProfile::Kind::exp_rayleigh: {
        if (profile.paths == 0) throw ConfigError("channel: P must be >= 1");
        if (!(profile.decay_paths > 0.0)) throw ConfigError("channel: decay must be positive");
        Rng rng(seed);
        ch.taps.resize(profile.paths);
        for (std::size_t p = 0; p < profile.paths; ++p)
            ch.taps[p] = rng.complex_gaussian(std::exp(-static_cast<double>(p) / profile.decay_paths));
        const double scale = 1.0 / std::sqrt(ch.energy());
        for (auto& h : ch.taps) h *= scale;
        break;
    }
    }
    ch.validate();
    return ch;
}

inline ChannelModel sample_random_channel(std::size_t paths, const std::string& profile_name, std::uint64_t seed,
                                          double decay_paths = 1.0) {
    const auto kind = parse_channel_kind(profile_name);
    if (kind == ChannelProfile::Kind::fixed)
        throw ConfigError("fixed profile needs explicit taps; use ChannelProfile::fixed");
    return sample_random_channel(ChannelProfile::exp_rayleigh(paths, decay_paths), seed);
}

// "re,im; re,im; ..." -> taps
inline ComplexVector parse_taps(const std::string& text) {
    ComplexVector taps;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::stringstream pair(item);
        double re = 0.0, im = 0.0;
        char comma = 0;
        if (!(pair >> re >> comma >> im) || comma != ',')
            throw ConfigError("channel taps: cannot parse '" + item + "' (expected re,im)");
        taps.emplace_back(re, im);
    }
    if (taps.empty()) throw ConfigError("channel taps: empty list");
    return taps;
}

inline std::string format_taps(std::span<const Complex> taps) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < taps.size(); ++i) {
        if (i) out << "; ";
        out << taps[i].real() << ',' << taps[i].imag();
    }
    return out.str();
}

} // namespace ock
