#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ock/config.hpp"
#include "ock/framing.hpp"
#include "ock/passband.hpp"
#include "ock/sweep.hpp"
#include "ock/wav.hpp"

namespace ock {

inline std::string results_csv(const BerReport& report) {
    std::ostringstream out;
    out << "snr_db,bits,errors,ber,ci_lo,ci_hi,theory\n";
    for (const auto& p : report.points) {
        out << std::defaultfloat << std::setprecision(10) << p.snr_db << ',' << p.bits << ',' << p.errors << ','
            << std::scientific << std::setprecision(6) << p.ber << ',' << p.ci95.lo << ',' << p.ci95.hi << ','
            << p.theory << '\n';
    }
    return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw IoError("write failed for '" + path + "'");
}

inline void emit_results(const BerReport& report, const std::string& path) { write_text(path, results_csv(report)); }

// Full config and seed plus per-point bookkeeping. The timestamp lives here
// and nowhere else so the CSV stays byte-reproducible.
inline void emit_manifest(const BerReport& report, const SweepConfig& cfg, const std::string& path) {
    auto tree = config_to_tree(cfg);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream stamp;
    stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    tree.put("run.version", report.version);
    tree.put("run.seed", report.seed);
    tree.put("run.config_hash", report.config_hash);
    tree.put("run.timestamp_utc", stamp.str());
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& p = report.points[i];
        const std::string key = "point_" + std::to_string(i) + ".";
        tree.put(key + "snr_db", format_number(p.snr_db));
        tree.put(key + "packets", p.packets);
        tree.put(key + "receiver_failures", p.failures);
        tree.put(key + "flagged", p.flagged);
    }
    std::ostringstream out;
    boost::property_tree::write_ini(out, tree);
    write_text(path, out.str());
}

// Upconverts a packet, peak-normalizes it to -1 dBFS and writes the WAV plus
// its sidecar. Returns the sidecar contents.
inline WavSidecar emit_waveform(const Packet& packet, const std::string& path, const PassbandSpec& spec,
                                WavFormat format = WavFormat::pcm16) {
    const auto passband = upconvert(packet.baseband, spec);
    double peak = 0.0;
    for (double s : passband) peak = std::max(peak, std::abs(s));
    WavSidecar meta;
    meta.scale = peak > 0.0 ? std::pow(10.0, kExportPeakDbfs / 20.0) / peak : 1.0;
    meta.passband_rate_hz = spec.passband_rate_hz();
    meta.carrier_hz = spec.carrier_hz;
    meta.baseband_rate_hz = spec.baseband_rate_hz;
    meta.band_center_hz = spec.band_center_hz;
    meta.interpolation = spec.interpolation;
    meta.baseband_samples = packet.baseband.size();
    meta.format = to_string(format);

    const double rate = std::round(spec.passband_rate_hz());
    if (std::abs(rate - spec.passband_rate_hz()) > 1e-6 || rate > 4294967295.0)
        throw ConfigError("passband rate must be an integer number of Hz for WAV export");
    std::vector<double> scaled(passband.size());
    for (std::size_t i = 0; i < passband.size(); ++i) scaled[i] = passband[i] * meta.scale;
    write_wav(path, scaled, static_cast<std::uint32_t>(rate), format);
    write_sidecar(sidecar_path(path), meta);
    return meta;
}

// Reads a WAV written by emit_waveform back to complex baseband at the modem's
// amplitude. Without a sidecar the signal is left at file scale, which does not
// change symbol decisions.
inline ComplexVector load_waveform(const std::string& path, const PassbandSpec& fallback) {
    const auto wav = read_wav(path);
    PassbandSpec spec = fallback;
    double scale = 1.0;
    std::size_t keep = 0;
    if (std::ifstream(sidecar_path(path)).good()) {
        const auto meta = read_sidecar(sidecar_path(path));
        scale = meta.scale;
        spec.baseband_rate_hz = meta.baseband_rate_hz;
        spec.carrier_hz = meta.carrier_hz;
        spec.band_center_hz = meta.band_center_hz;
        spec.interpolation = meta.interpolation;
        keep = meta.baseband_samples;
    }
    if (std::abs(spec.passband_rate_hz() - wav.sample_rate) > 0.5)
        throw ConfigError("WAV sample rate " + std::to_string(wav.sample_rate) + " Hz does not match the passband rate");
    std::vector<double> samples(wav.samples);
    for (auto& s : samples) s /= scale;
    auto bb = downconvert(samples, spec);
    if (keep && keep < bb.size()) bb.resize(keep);
    return bb;
}

} // namespace ock
