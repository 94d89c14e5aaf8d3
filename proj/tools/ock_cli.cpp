// Command-line front end: bank, tx, rx, sweep, theory.
//
// Exit codes: 0 success, 2 config error, 3 receiver failure, 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ock/ock.hpp"

using namespace ock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitReceiver = 3;
constexpr int kExitIo = 4;

// Flags shared by every subcommand.
struct CommonFlags {
    std::string config;
    std::optional<std::string> profile;
    std::optional<unsigned> order;
    std::optional<std::string> receiver;
    std::optional<std::size_t> paths;
    std::optional<std::string> metric;
    std::optional<std::string> envelope;
    std::optional<std::size_t> symbols;
    std::optional<double> energy;
    std::optional<std::string> channel;
    std::optional<std::string> taps;
    std::optional<std::size_t> channel_paths;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config, "INI config file")->check(CLI::ExistingFile);
        app->add_option("--profile", profile, "waveform profile: default or nominal");
        app->add_option("-M,--order", order, "modulation order M");
        app->add_option("--receiver", receiver, "coherent or noncoherent");
        app->add_option("--paths", paths, "receiver channel length P");
        app->add_option("--metric", metric, "coherent statistic: real or magnitude");
        app->add_option("--envelope", envelope, "non-coherent envelope: matched or literal");
        app->add_option("--symbols", symbols, "symbols per packet");
        app->add_option("--energy", energy, "symbol energy E");
        app->add_option("--channel", channel, "identity, fixed or exp-rayleigh");
        app->add_option("--taps", taps, "fixed channel taps as 're,im; re,im; ...'");
        app->add_option("--channel-paths", channel_paths, "exp-rayleigh path count");
    }

    SweepConfig build() const {
        SweepConfig cfg = config.empty() ? SweepConfig{} : load_config(config);
        if (profile) {
            const unsigned keep = cfg.waveform.modulation_order;
            cfg.profile = *profile;
            cfg.waveform = profile_params(*profile);
            cfg.waveform.modulation_order = keep;
        }
        if (order) cfg.waveform.modulation_order = *order;
        if (receiver) cfg.receiver.kind = parse_receiver_kind(*receiver);
        if (paths) cfg.receiver.paths = *paths;
        if (metric) cfg.receiver.metric = parse_coherent_metric(*metric);
        if (envelope) cfg.receiver.envelope = parse_envelope_form(*envelope);
        if (symbols) cfg.frame.symbols = *symbols;
        if (energy) cfg.frame.symbol_energy = *energy;
        if (channel) {
            const auto kind = parse_channel_kind(*channel);
            if (*channel == "identity") cfg.channel = ChannelProfile::identity();
            else if (kind == ChannelProfile::Kind::fixed) cfg.channel = ChannelProfile::fixed(ComplexVector{});
            else cfg.channel = ChannelProfile::exp_rayleigh(cfg.receiver.paths);
        }
        if (taps) cfg.channel = ChannelProfile::fixed(parse_taps(*taps));
        if (cfg.channel.kind == ChannelProfile::Kind::fixed && cfg.channel.taps.empty())
            throw ConfigError("channel 'fixed' needs --taps");
        if (channel_paths) {
            if (cfg.channel.kind != ChannelProfile::Kind::exp_rayleigh)
                throw ConfigError("--channel-paths only applies to exp-rayleigh");
            cfg.channel.paths = *channel_paths;
        }
        cfg.waveform.validate();
        return cfg;
    }
};

Bits parse_bit_string(const std::string& text) {
    Bits bits;
    for (char ch : text) {
        if (ch == '0' || ch == '1') bits.push_back(static_cast<std::uint8_t>(ch - '0'));
        else if (!std::isspace(static_cast<unsigned char>(ch))) throw ConfigError(std::string("bad bit character '") + ch + "'");
    }
    return bits;
}

std::string bit_string(const Bits& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int cmd_bank(const CommonFlags& common, bool show_gram) {
    const auto cfg = common.build();
    const ChirpBank bank(cfg.waveform);
    const auto& p = bank.params();
    std::cout << "M                    " << bank.size() << '\n'
              << "bits per symbol      " << bank.bits_per_symbol() << '\n'
              << "samples per symbol   " << bank.samples_per_symbol() << '\n'
              << "symbol duration ms   " << p.symbol_duration_s * 1e3 << '\n'
              << "f0 kHz               " << p.initial_frequency_hz * 1e-3 << '\n'
              << "spacing kHz          " << p.frequency_spacing_hz * 1e-3 << " (df*T = "
              << p.frequency_spacing_hz * p.symbol_duration_s << ")\n"
              << "chirp rate Hz/s      " << p.chirp_rate_hz_per_s << '\n'
              << "highest freq kHz     " << p.highest_frequency_hz() * 1e-3 << '\n'
              << "sample rate kHz      " << p.sample_rate_hz * 1e-3 << '\n'
              << "carrier kHz          " << p.carrier_hz * 1e-3 << '\n'
              << "max |cross corr|     " << bank.max_cross_correlation() << '\n';
    for (unsigned m = 0; m < bank.size(); ++m) {
        std::cout << "label " << m << "              " << bit_string(bank.label(m)) << '\n';
    }
    if (show_gram) {
        const auto g = bank.gram();
        std::cout << "|Gram|\n";
        for (unsigned k = 0; k < bank.size(); ++k) {
            for (unsigned l = 0; l < bank.size(); ++l)
                std::cout << (l ? " " : "") << std::scientific << std::setprecision(3) << std::abs(g[k * bank.size() + l]);
            std::cout << '\n';
        }
    }
    return kExitOk;
}

struct TxFlags {
    std::string bits;
    std::string bits_file;
    std::string out;
    std::string format = "pcm16";
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
    std::string bits_out;
};

int cmd_tx(const CommonFlags& common, const TxFlags& f) {
    const auto cfg = common.build();
    const ChirpBank bank(cfg.waveform);
    const auto layout = cfg.frame.layout(cfg.waveform);
    Rng rng(f.seed);
    Bits bits;
    if (!f.bits.empty()) bits = parse_bit_string(f.bits);
    else if (!f.bits_file.empty()) bits = parse_bit_string(read_text(f.bits_file));
    else bits = rng.bits(cfg.bits_per_packet());

    FrameLayout used = layout;
    used.symbols = bits.size() / bank.bits_per_symbol();
    Packet pkt = modulate(bits, bank, used);

    const ChannelModel ch = sample_random_channel(cfg.channel, rng.next_u64());
    const double n0 = f.snr_db ? cfg.frame.symbol_energy / db_to_linear(*f.snr_db) : 0.0;
    pkt.baseband = apply_channel(pkt.baseband, ch, n0, rng);

    const auto meta = emit_waveform(pkt, f.out, cfg.passband(), parse_wav_format(f.format));
    if (!f.bits_out.empty()) write_text(f.bits_out, bit_string(bits) + "\n");
    std::cerr << "wrote " << f.out << ": " << bits.size() << " bits, " << used.symbols << " symbols, "
              << meta.passband_rate_hz << " Hz, channel " << format_taps(ch.taps) << '\n';
    return kExitOk;
}

struct RxFlags {
    std::string in;
    std::string expect;
    std::size_t symbols = 0;
    bool verbose = false;
};

int cmd_rx(const CommonFlags& common, const RxFlags& f) {
    auto cfg = common.build();
    const ChirpBank bank(cfg.waveform);
    const auto spec = cfg.passband();
    const auto bb = load_waveform(f.in, spec);
    if (f.symbols) cfg.frame.symbols = f.symbols;
    else if (std::ifstream(sidecar_path(f.in)).good()) {
        // Payload length follows from the sidecar's baseband sample count.
        const auto meta = read_sidecar(sidecar_path(f.in));
        const auto header = cfg.frame.layout(cfg.waveform).header_samples();
        if (meta.baseband_samples > header)
            cfg.frame.symbols = (meta.baseband_samples - header) / bank.samples_per_symbol();
    }
    const auto layout = cfg.frame.layout(cfg.waveform);

    const DetectionResult result = cfg.receiver.kind == ReceiverKind::coherent
                                       ? receive_packet_coherent(bb, bank, layout, cfg.receiver.coherent_options())
                                       : receive_packet_noncoherent(bb, bank, layout, cfg.receiver.noncoherent_options());
    std::cout << bit_string(result.bits) << '\n';
    std::cerr << "receiver " << to_string(cfg.receiver.kind) << ", sync offset " << result.sync_offset << ", "
              << result.symbol_indices.size() << " symbols\n";
    if (result.channel) std::cerr << "channel estimate " << format_taps(result.channel->taps) << '\n';
    if (f.verbose) {
        for (std::size_t n = 0; n < result.metrics.size(); ++n) {
            std::cerr << "symbol " << n << " -> " << result.symbol_indices[n] << ":";
            for (double v : result.metrics[n]) std::cerr << ' ' << v;
            std::cerr << '\n';
        }
    }
    if (!f.expect.empty()) {
        const Bits expected = parse_bit_string(read_text(f.expect));
        std::size_t errors = 0;
        const std::size_t n = std::min(expected.size(), result.bits.size());
        for (std::size_t i = 0; i < n; ++i) errors += expected[i] != result.bits[i];
        errors += std::max(expected.size(), result.bits.size()) - n;
        std::cerr << "bit errors " << errors << " / " << expected.size() << '\n';
    }
    return kExitOk;
}

struct SweepFlags {
    std::optional<std::string> snr;
    std::optional<std::string> axis;
    std::optional<std::uint64_t> min_errors;
    std::optional<std::uint64_t> max_bits;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool ci = false;
    bool quiet = false;
    std::string out = "results.csv";
    std::string manifest;
};

int cmd_sweep(const CommonFlags& common, const SweepFlags& f) {
    if (f.ci && !f.seed) throw ConfigError("--ci requires an explicit --seed");
    auto cfg = common.build();
    if (f.snr) cfg.snr_db = parse_number_list(*f.snr);
    if (f.axis) cfg.snr_axis = parse_snr_axis(*f.axis);
    if (f.min_errors) cfg.min_bit_errors = *f.min_errors;
    if (f.max_bits) cfg.max_bits = *f.max_bits;
    if (f.seed) cfg.seed = *f.seed;
    if (f.workers) cfg.workers = *f.workers;
    cfg.validate();

    const auto report = run_sweep(cfg, [&](const BerPoint& p) {
        if (f.quiet) return;
        std::cerr << "snr " << p.snr_db << " dB: ber " << p.ber << " (" << p.errors << "/" << p.bits << "), theory "
                  << p.theory << (p.flagged ? " [flagged: most packets lost]" : "") << '\n';
    });
    emit_results(report, f.out);
    emit_manifest(report, cfg, f.manifest.empty() ? f.out + ".manifest.ini" : f.manifest);
    return kExitOk;
}

struct TheoryFlags {
    std::string snr = "0,2,4,6,8,10,12";
    std::string axis = "es_n0";
};

int cmd_theory(const CommonFlags& common, const TheoryFlags& f) {
    const auto cfg = common.build();
    const unsigned M = cfg.waveform.modulation_order;
    const bool eb = parse_snr_axis(f.axis) == SnrAxis::eb_n0;
    std::cout << (eb ? "eb_n0_db" : "es_n0_db") << ",coherent,noncoherent\n";
    for (double db : parse_number_list(f.snr)) {
        const double es = db_to_linear(db) * (eb ? std::log2(M) : 1.0);
        std::cout << std::defaultfloat << std::setprecision(10) << db << ',' << std::scientific
                  << std::setprecision(6) << theory_ber_coherent(es, M) << ',' << theory_ber_noncoherent(es, M)
                  << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"orthogonal chirp keying modem"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonFlags common;

    bool show_gram = false;
    auto* bank = app.add_subcommand("bank", "print chirp bank diagnostics");
    common.attach(bank);
    bank->add_flag("--gram", show_gram, "print the |Gram| matrix");

    TxFlags tx;
    auto* tx_cmd = app.add_subcommand("tx", "modulate bits into a passband WAV");
    common.attach(tx_cmd);
    tx_cmd->add_option("--bits", tx.bits, "payload as a 0/1 string");
    tx_cmd->add_option("--bits-file", tx.bits_file, "payload file of 0/1 characters")->check(CLI::ExistingFile);
    tx_cmd->add_option("-o,--out", tx.out, "output WAV path")->required();
    tx_cmd->add_option("--format", tx.format, "pcm16 or float32");
    tx_cmd->add_option("--snr", tx.snr_db, "add AWGN at this E/N0 in dB");
    tx_cmd->add_option("--seed", tx.seed, "seed for random payload, channel and noise");
    tx_cmd->add_option("--bits-out", tx.bits_out, "write the transmitted bits here");

    RxFlags rx;
    auto* rx_cmd = app.add_subcommand("rx", "demodulate a WAV to bits");
    common.attach(rx_cmd);
    rx_cmd->add_option("-i,--in", rx.in, "input WAV path")->required();
    rx_cmd->add_option("--expect", rx.expect, "reference bits file; prints the error count");
    rx_cmd->add_option("--payload-symbols", rx.symbols, "symbols to decode (default: from sidecar)");
    rx_cmd->add_flag("-v,--verbose", rx.verbose, "print per-symbol metrics");

    SweepFlags sw;
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo BER sweep to CSV");
    common.attach(sweep);
    sweep->add_option("--snr", sw.snr, "comma-separated SNR grid in dB");
    sweep->add_option("--axis", sw.axis, "es_n0 or eb_n0");
    sweep->add_option("--min-errors", sw.min_errors, "stop a point after this many bit errors");
    sweep->add_option("--max-bits", sw.max_bits, "stop a point after this many bits");
    sweep->add_option("--seed", sw.seed, "base seed");
    sweep->add_option("-j,--workers", sw.workers, "worker threads (default: all cores)");
    sweep->add_flag("--ci", sw.ci, "CI mode: require an explicit seed");
    sweep->add_flag("-q,--quiet", sw.quiet, "no progress output");
    sweep->add_option("-o,--out", sw.out, "CSV output path");
    sweep->add_option("--manifest", sw.manifest, "manifest path (default: <out>.manifest.ini)");

    TheoryFlags th;
    auto* theory = app.add_subcommand("theory", "closed-form BER table");
    common.attach(theory);
    theory->add_option("--snr", th.snr, "comma-separated SNR grid in dB");
    theory->add_option("--axis", th.axis, "es_n0 or eb_n0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*bank) return cmd_bank(common, show_gram);
        if (*tx_cmd) return cmd_tx(common, tx);
        if (*rx_cmd) return cmd_rx(common, rx);
        if (*sweep) return cmd_sweep(common, sw);
        if (*theory) return cmd_theory(common, th);
    } catch (const ReceiverError& e) {
        std::cerr << "receiver failure: " << e.what() << '\n';
        return kExitReceiver;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
