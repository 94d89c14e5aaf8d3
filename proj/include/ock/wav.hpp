#pragma once

// Mono RIFF/WAVE reader and writer (16-bit PCM or 32-bit IEEE float) plus the
// peak-normalized passband export with its scaling sidecar.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ock/errors.hpp"

namespace ock {

enum class WavFormat { pcm16, float32 };

inline WavFormat parse_wav_format(const std::string& name) {
    if (name == "pcm16") return WavFormat::pcm16;
    if (name == "float32") return WavFormat::float32;
    throw ConfigError("unknown WAV format '" + name + "' (expected pcm16 or float32)");
}

inline std::string to_string(WavFormat f) { return f == WavFormat::pcm16 ? "pcm16" : "float32"; }

struct WavData {
    std::vector<double> samples;  // full scale = +/-1
    std::uint32_t sample_rate = 0;
    WavFormat format = WavFormat::pcm16;
};

namespace detail {

inline void put_le(std::vector<char>& out, std::uint32_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_le(const char* p, int bytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

} // namespace detail

// Samples are clipped to [-1, 1]. PCM16 rounds to the nearest code.
inline void write_wav(const std::string& path, std::span<const double> samples, std::uint32_t sample_rate,
                      WavFormat format) {
    const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
    const std::uint16_t tag = format == WavFormat::pcm16 ? 1 : 3;
    const std::uint32_t block = bits / 8;
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * block);

    std::vector<char> buf;
    buf.reserve(44 + data_bytes);
    buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
    detail::put_le(buf, 36 + data_bytes, 4);
    buf.insert(buf.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    detail::put_le(buf, 16, 4);
    detail::put_le(buf, tag, 2);
    detail::put_le(buf, 1, 2);
    detail::put_le(buf, sample_rate, 4);
    detail::put_le(buf, sample_rate * block, 4);
    detail::put_le(buf, block, 2);
    detail::put_le(buf, bits, 2);
    buf.insert(buf.end(), {'d', 'a', 't', 'a'});
    detail::put_le(buf, data_bytes, 4);
    for (double s : samples) {
        const double c = std::clamp(s, -1.0, 1.0);
        if (format == WavFormat::pcm16) {
            const auto q = static_cast<std::int16_t>(std::lround(c * 32767.0));
            detail::put_le(buf, static_cast<std::uint16_t>(q), 2);
        } else {
            detail::put_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(c)), 4);
        }
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("write failed for '" + path + "'");
}

inline WavData read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    std::vector<char> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw IoError("'" + path + "' is not a RIFF/WAVE file");

    WavData wav;
    std::uint16_t tag = 0, channels = 0, bits = 0;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const char* id = buf.data() + pos;
        const std::uint32_t size = detail::get_le(id + 4, 4);
        const std::size_t body = pos + 8;
        if (body + size > buf.size()) throw IoError("'" + path + "': truncated chunk");
        if (std::memcmp(id, "fmt ", 4) == 0 && size >= 16) {
            tag = static_cast<std::uint16_t>(detail::get_le(buf.data() + body, 2));
            channels = static_cast<std::uint16_t>(detail::get_le(buf.data() + body + 2, 2));
            wav.sample_rate = detail::get_le(buf.data() + body + 4, 4);
            bits = static_cast<std::uint16_t>(detail::get_le(buf.data() + body + 14, 2));
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (!have_fmt) throw IoError("'" + path + "': data chunk before fmt chunk");
            if (channels != 1) throw IoError("'" + path + "': only mono WAV is supported");
            if (tag == 1 && bits == 16) {
                wav.format = WavFormat::pcm16;
                for (std::size_t i = 0; i + 2 <= size; i += 2) {
                    const auto raw = static_cast<std::int16_t>(detail::get_le(buf.data() + body + i, 2));
                    wav.samples.push_back(raw / 32767.0);
                }
            } else if (tag == 3 && bits == 32) {
                wav.format = WavFormat::float32;
                for (std::size_t i = 0; i + 4 <= size; i += 4)
                    wav.samples.push_back(std::bit_cast<float>(detail::get_le(buf.data() + body + i, 4)));
            } else {
                throw IoError("'" + path + "': unsupported sample format");
            }
            return wav;
        }
        pos = body + size + (size & 1U);
    }
    throw IoError("'" + path + "': no data chunk");
}

// Peak level of exported passband files.
inline constexpr double kExportPeakDbfs = -1.0;

// Written next to every exported WAV as <wav>.meta. `scale` maps file samples
// back to the modem's amplitude: modem = file / scale.
struct WavSidecar {
    double scale = 1.0;
    double passband_rate_hz = 0.0;
    double carrier_hz = 0.0;
    double baseband_rate_hz = 0.0;
    double band_center_hz = 0.0;
    unsigned interpolation = 0;
    std::size_t baseband_samples = 0;
    std::string format = "pcm16";
};

inline std::string sidecar_path(const std::string& wav_path) { return wav_path + ".meta"; }

inline void write_sidecar(const std::string& path, const WavSidecar& s) {
    boost::property_tree::ptree tree;
    tree.put("wav.scale", s.scale);
    tree.put("wav.peak_dbfs", kExportPeakDbfs);
    tree.put("wav.format", s.format);
    tree.put("wav.sample_rate_hz", s.passband_rate_hz);
    tree.put("signal.carrier_frequency_hz", s.carrier_hz);
    tree.put("signal.baseband_rate_hz", s.baseband_rate_hz);
    tree.put("signal.band_center_hz", s.band_center_hz);
    tree.put("signal.interpolation", s.interpolation);
    tree.put("signal.baseband_samples", s.baseband_samples);
    try {
        boost::property_tree::write_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw IoError("cannot write sidecar '" + path + "': " + e.message());
    }
}

inline WavSidecar read_sidecar(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw IoError("cannot read sidecar '" + path + "': " + e.message());
    }
    try {
        WavSidecar s;
        s.scale = tree.get<double>("wav.scale");
        s.format = tree.get<std::string>("wav.format");
        s.passband_rate_hz = tree.get<double>("wav.sample_rate_hz");
        s.carrier_hz = tree.get<double>("signal.carrier_frequency_hz");
        s.baseband_rate_hz = tree.get<double>("signal.baseband_rate_hz");
        s.band_center_hz = tree.get<double>("signal.band_center_hz");
        s.interpolation = tree.get<unsigned>("signal.interpolation");
        s.baseband_samples = tree.get<std::size_t>("signal.baseband_samples");
        return s;
    } catch (const boost::property_tree::ptree_error& e) {
        throw IoError("sidecar '" + path + "' is incomplete: " + e.what());
    }
}

} // namespace ock
