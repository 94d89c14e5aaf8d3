#pragma once

// Run configuration and its INI representation. Physical quantities carry
// their unit in the key name.
//
//   [waveform]  profile, modulation_order, symbol_duration_ms,
//               initial_frequency_khz, frequency_spacing_per_symbol |
//               frequency_spacing_khz, chirp_rate_hz_per_s, sample_rate_khz,
//               carrier_frequency_khz
//   [frame]     pn_length_chips, pn_seed, guard_duration_ms,
//               symbols_per_packet, symbol_energy
//   [channel]   profile (identity | fixed | exp-rayleigh), taps, paths,
//               decay_paths
//   [receiver]  type, paths, coherent_metric, envelope, sync_threshold
//   [passband]  interpolation
//   [sweep]     snr_db, snr_axis, min_bit_errors, max_bits, seed, workers

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ock/channel.hpp"
#include "ock/errors.hpp"
#include "ock/framing.hpp"
#include "ock/passband.hpp"
#include "ock/rx_coherent.hpp"
#include "ock/rx_noncoherent.hpp"
#include "ock/waveform.hpp"

namespace ock {

inline constexpr const char* kVersion = "0.1.0";

enum class ReceiverKind { coherent, noncoherent };
enum class SnrAxis { es_n0, eb_n0 };

struct FrameSpec {
    std::size_t pn_length = 128;
    std::uint32_t pn_seed = 1;
    double guard_s = 5.12e-3;
    std::size_t symbols = 32;
    double symbol_energy = 1.0;

    FrameLayout layout(const ChirpParams& params) const {
        return make_layout(params, pn_length, pn_seed, guard_s, symbols, symbol_energy);
    }
};

struct ReceiverSpec {
    ReceiverKind kind = ReceiverKind::coherent;
    std::size_t paths = 4;
    CoherentMetric metric = CoherentMetric::real_part;
    EnvelopeForm envelope = EnvelopeForm::matched;
    double sync_threshold = 6.0;

    CoherentOptions coherent_options() const { return {paths, metric, sync_threshold}; }
    NoncoherentOptions noncoherent_options() const { return {envelope, sync_threshold}; }
};

struct SweepConfig {
    std::string profile = "default";
    ChirpParams waveform = default_profile();
    FrameSpec frame;
    ChannelProfile channel = ChannelProfile::identity();
    ReceiverSpec receiver;
    unsigned passband_interpolation = 4;
    std::vector<double> snr_db{0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
    SnrAxis snr_axis = SnrAxis::es_n0;
    std::uint64_t min_bit_errors = 100;
    std::uint64_t max_bits = 10'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0: hardware concurrency

    PassbandSpec passband() const { return PassbandSpec::for_params(waveform, passband_interpolation); }

    std::uint64_t bits_per_packet() const { return frame.symbols * waveform.bits_per_symbol(); }

    void validate() const {
        waveform.validate();
        frame.layout(waveform);
        if (frame.symbols == 0) throw ConfigError("frame: symbols_per_packet must be >= 1");
        if (receiver.paths == 0) throw ConfigError("receiver: paths must be >= 1");
        if (receiver.kind == ReceiverKind::coherent && frame.pn_length < 2 * receiver.paths - 1)
            throw ConfigError("receiver: coherent sync needs pn_length_chips >= 2 * paths - 1");
        if (channel.path_count() == 0) throw ConfigError("channel: P must be >= 1");
        if (snr_db.empty()) throw ConfigError("sweep: SNR grid is empty");
        for (std::size_t i = 1; i < snr_db.size(); ++i)
            if (!(snr_db[i] > snr_db[i - 1])) throw ConfigError("sweep: SNR grid must be strictly increasing");
        if (min_bit_errors < 1) throw ConfigError("sweep: min_bit_errors must be >= 1");
        if (max_bits < bits_per_packet()) throw ConfigError("sweep: max_bits must cover at least one packet");
    }
};

inline std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = item.find_last_not_of(" \t");
        const std::string token = item.substr(first, last - first + 1);
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + token + "'");
        }
    }
    return out;
}

// 15 significant digits: unit conversions (ms <-> s, kHz <-> Hz) then print
// the same text on every round trip.
inline std::string format_number(double v) {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::digits10);
    out << v;
    return out.str();
}

inline ChirpParams profile_params(const std::string& name) {
    if (name == "default") return default_profile();
    if (name == "nominal") return nominal_profile();
    throw ConfigError("unknown waveform profile '" + name + "' (expected default or nominal)");
}

namespace detail {

template <typename T>
T get_or(const boost::property_tree::ptree& tree, const std::string& key, T fallback) {
    const auto node = tree.get_child_optional(key);
    if (!node) return fallback;
    if constexpr (std::is_unsigned_v<T>) {
        if (node->data().find('-') != std::string::npos) throw ConfigError("'" + key + "' must be non-negative");
    }
    try {
        return node->get_value<T>();
    } catch (const boost::property_tree::ptree_bad_data& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

inline ReceiverKind parse_receiver(const std::string& s) {
    if (s == "coherent") return ReceiverKind::coherent;
    if (s == "noncoherent") return ReceiverKind::noncoherent;
    throw ConfigError("unknown receiver '" + s + "' (expected coherent or noncoherent)");
}

inline CoherentMetric parse_metric(const std::string& s) {
    if (s == "real") return CoherentMetric::real_part;
    if (s == "magnitude") return CoherentMetric::magnitude;
    throw ConfigError("unknown coherent metric '" + s + "' (expected real or magnitude)");
}

inline EnvelopeForm parse_envelope(const std::string& s) {
    if (s == "matched") return EnvelopeForm::matched;
    if (s == "literal") return EnvelopeForm::literal;
    throw ConfigError("unknown envelope form '" + s + "' (expected matched or literal)");
}

inline SnrAxis parse_axis(const std::string& s) {
    if (s == "es_n0") return SnrAxis::es_n0;
    if (s == "eb_n0") return SnrAxis::eb_n0;
    throw ConfigError("unknown SNR axis '" + s + "' (expected es_n0 or eb_n0)");
}

} // namespace detail

inline ReceiverKind parse_receiver_kind(const std::string& s) { return detail::parse_receiver(s); }
inline CoherentMetric parse_coherent_metric(const std::string& s) { return detail::parse_metric(s); }
inline EnvelopeForm parse_envelope_form(const std::string& s) { return detail::parse_envelope(s); }
inline SnrAxis parse_snr_axis(const std::string& s) { return detail::parse_axis(s); }

inline std::string to_string(ReceiverKind k) { return k == ReceiverKind::coherent ? "coherent" : "noncoherent"; }
inline std::string to_string(CoherentMetric m) { return m == CoherentMetric::real_part ? "real" : "magnitude"; }
inline std::string to_string(EnvelopeForm e) { return e == EnvelopeForm::matched ? "matched" : "literal"; }
inline std::string to_string(SnrAxis a) { return a == SnrAxis::es_n0 ? "es_n0" : "eb_n0"; }

inline SweepConfig config_from_tree(const boost::property_tree::ptree& t) {
    using detail::get_or;
    SweepConfig c;
    c.profile = get_or<std::string>(t, "waveform.profile", "default");
    c.waveform = profile_params(c.profile);
    auto& w = c.waveform;
    w.modulation_order = get_or<unsigned>(t, "waveform.modulation_order", w.modulation_order);
    w.symbol_duration_s = get_or<double>(t, "waveform.symbol_duration_ms", w.symbol_duration_s * 1e3) * 1e-3;
    w.initial_frequency_hz = get_or<double>(t, "waveform.initial_frequency_khz", w.initial_frequency_hz * 1e-3) * 1e3;
    const auto per_symbol = t.get_optional<std::string>("waveform.frequency_spacing_per_symbol");
    const auto spacing_khz = t.get_optional<std::string>("waveform.frequency_spacing_khz");
    if (per_symbol && spacing_khz)
        throw ConfigError("set only one of frequency_spacing_per_symbol and frequency_spacing_khz");
    if (per_symbol) {
        w.frequency_spacing_hz = get_or<unsigned>(t, "waveform.frequency_spacing_per_symbol", 1) / w.symbol_duration_s;
    } else if (spacing_khz) {
        w.frequency_spacing_hz = get_or<double>(t, "waveform.frequency_spacing_khz", 0.0) * 1e3;
    } else if (w.require_orthogonal) {
        w.frequency_spacing_hz = 1.0 / w.symbol_duration_s;
    }
    w.chirp_rate_hz_per_s = get_or<double>(t, "waveform.chirp_rate_hz_per_s", w.chirp_rate_hz_per_s);
    w.sample_rate_hz = get_or<double>(t, "waveform.sample_rate_khz", w.sample_rate_hz * 1e-3) * 1e3;
    w.carrier_hz = get_or<double>(t, "waveform.carrier_frequency_khz", w.carrier_hz * 1e-3) * 1e3;

    c.frame.pn_length = get_or<std::size_t>(t, "frame.pn_length_chips", c.frame.pn_length);
    c.frame.pn_seed = get_or<std::uint32_t>(t, "frame.pn_seed", c.frame.pn_seed);
    c.frame.guard_s = get_or<double>(t, "frame.guard_duration_ms", c.frame.guard_s * 1e3) * 1e-3;
    c.frame.symbols = get_or<std::size_t>(t, "frame.symbols_per_packet", c.frame.symbols);
    c.frame.symbol_energy = get_or<double>(t, "frame.symbol_energy", c.frame.symbol_energy);

    const auto channel = get_or<std::string>(t, "channel.profile", "identity");
    const auto kind = parse_channel_kind(channel);
    if (channel == "identity") {
        c.channel = ChannelProfile::identity();
    } else if (kind == ChannelProfile::Kind::fixed) {
        const auto taps = t.get_optional<std::string>("channel.taps");
        if (!taps) throw ConfigError("channel profile 'fixed' needs a taps entry");
        c.channel = ChannelProfile::fixed(parse_taps(*taps));
    } else {
        c.channel = ChannelProfile::exp_rayleigh(get_or<std::size_t>(t, "channel.paths", 4),
                                                 get_or<double>(t, "channel.decay_paths", 1.0));
    }

    c.receiver.kind = detail::parse_receiver(get_or<std::string>(t, "receiver.type", "coherent"));
    c.receiver.paths = get_or<std::size_t>(t, "receiver.paths", c.receiver.paths);
    c.receiver.metric = detail::parse_metric(get_or<std::string>(t, "receiver.coherent_metric", "real"));
    c.receiver.envelope = detail::parse_envelope(get_or<std::string>(t, "receiver.envelope", "matched"));
    c.receiver.sync_threshold = get_or<double>(t, "receiver.sync_threshold", c.receiver.sync_threshold);

    c.passband_interpolation = get_or<unsigned>(t, "passband.interpolation", c.passband_interpolation);

    if (const auto grid = t.get_optional<std::string>("sweep.snr_db")) c.snr_db = parse_number_list(*grid);
    c.snr_axis = detail::parse_axis(get_or<std::string>(t, "sweep.snr_axis", "es_n0"));
    c.min_bit_errors = get_or<std::uint64_t>(t, "sweep.min_bit_errors", c.min_bit_errors);
    c.max_bits = get_or<std::uint64_t>(t, "sweep.max_bits", c.max_bits);
    c.seed = get_or<std::uint64_t>(t, "sweep.seed", c.seed);
    c.workers = get_or<unsigned>(t, "sweep.workers", c.workers);
    return c;
}

inline SweepConfig load_config(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        // A missing file is an I/O problem; a malformed one is a config problem.
        if (e.line() == 0) throw IoError("cannot read config '" + path + "': " + e.message());
        throw ConfigError("config '" + path + "' line " + std::to_string(e.line()) + ": " + e.message());
    }
    return config_from_tree(tree);
}

// Canonical tree for a config. `workers` is left out: it never changes results.
inline boost::property_tree::ptree config_to_tree(const SweepConfig& c) {
    boost::property_tree::ptree t;
    const auto& w = c.waveform;
    t.put("waveform.profile", c.profile);
    t.put("waveform.modulation_order", w.modulation_order);
    t.put("waveform.symbol_duration_ms", format_number(w.symbol_duration_s * 1e3));
    t.put("waveform.initial_frequency_khz", format_number(w.initial_frequency_hz * 1e-3));
    const double spacing_cycles = w.frequency_spacing_hz * w.symbol_duration_s;
    if (w.require_orthogonal && detail::near_integer(spacing_cycles))
        t.put("waveform.frequency_spacing_per_symbol", std::llround(spacing_cycles));
    else
        t.put("waveform.frequency_spacing_khz", format_number(w.frequency_spacing_hz * 1e-3));
    t.put("waveform.chirp_rate_hz_per_s", format_number(w.chirp_rate_hz_per_s));
    t.put("waveform.sample_rate_khz", format_number(w.sample_rate_hz * 1e-3));
    t.put("waveform.carrier_frequency_khz", format_number(w.carrier_hz * 1e-3));

    t.put("frame.pn_length_chips", c.frame.pn_length);
    t.put("frame.pn_seed", c.frame.pn_seed);
    t.put("frame.guard_duration_ms", format_number(c.frame.guard_s * 1e3));
    t.put("frame.symbols_per_packet", c.frame.symbols);
    t.put("frame.symbol_energy", format_number(c.frame.symbol_energy));

    if (c.channel.kind == ChannelProfile::Kind::fixed) {
        t.put("channel.profile", "fixed");
        t.put("channel.taps", format_taps(c.channel.taps));
    } else {
        t.put("channel.profile", "exp-rayleigh");
        t.put("channel.paths", c.channel.paths);
        t.put("channel.decay_paths", format_number(c.channel.decay_paths));
    }

    t.put("receiver.type", to_string(c.receiver.kind));
    t.put("receiver.paths", c.receiver.paths);
    t.put("receiver.coherent_metric", to_string(c.receiver.metric));
    t.put("receiver.envelope", to_string(c.receiver.envelope));
    t.put("receiver.sync_threshold", format_number(c.receiver.sync_threshold));

    t.put("passband.interpolation", c.passband_interpolation);

    std::string grid;
    for (std::size_t i = 0; i < c.snr_db.size(); ++i) grid += (i ? "," : "") + format_number(c.snr_db[i]);
    t.put("sweep.snr_db", grid);
    t.put("sweep.snr_axis", to_string(c.snr_axis));
    t.put("sweep.min_bit_errors", c.min_bit_errors);
    t.put("sweep.max_bits", c.max_bits);
    t.put("sweep.seed", c.seed);
    return t;
}

inline std::string config_text(const SweepConfig& c) {
    std::ostringstream out;
    boost::property_tree::write_ini(out, config_to_tree(c));
    return out.str();
}

// FNV-1a over the canonical config text.
inline std::string config_hash(const SweepConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config_text(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

} // namespace ock
