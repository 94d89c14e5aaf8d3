#pragma once

// Monte Carlo BER sweep.
//
// Trial t at grid point i is seeded with derive_seed(seed, i, t). Trials run
// in fixed-size batches across worker threads and are then folded in trial
// order, stopping at the first trial that meets the stopping rule, so the
// result does not depend on the worker count or on completion order.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ock/channel.hpp"
#include "ock/config.hpp"
#include "ock/framing.hpp"
#include "ock/rng.hpp"
#include "ock/rx_coherent.hpp"
#include "ock/rx_noncoherent.hpp"
#include "ock/theory.hpp"
#include "ock/waveform.hpp"

namespace ock {

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t packets = 0;
    std::uint64_t failures = 0;  // packets where the receiver threw
    double ber = 0.0;
    Interval ci95;
    double theory = 0.0;
    bool flagged = false;  // failures above half of the packets
};

struct BerReport {
    std::vector<BerPoint> points;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version = kVersion;
};

inline double es_n0_linear(const SweepConfig& cfg, double snr_db) {
    const double x = db_to_linear(snr_db);
    return cfg.snr_axis == SnrAxis::eb_n0 ? x * cfg.waveform.bits_per_symbol() : x;
}

inline double theory_ber(const SweepConfig& cfg, double snr_db) {
    const double es = es_n0_linear(cfg, snr_db);
    const unsigned M = cfg.waveform.modulation_order;
    if (std::isinf(es)) return 0.0;
    return cfg.receiver.kind == ReceiverKind::coherent ? theory_ber_coherent(es, M) : theory_ber_noncoherent(es, M);
}

// Noise level for a grid point; +inf dB gives a noiseless channel.
inline double noise_level(const SweepConfig& cfg, double snr_db) {
    const double es = es_n0_linear(cfg, snr_db);
    return std::isinf(es) ? 0.0 : cfg.frame.symbol_energy / es;
}

struct TrialOutcome {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    bool failed = false;
};

// Everything a trial needs, built once per sweep and shared read-only.
class TrialRunner {
public:
    explicit TrialRunner(const SweepConfig& cfg) : cfg_(cfg), bank_(cfg.waveform), layout_(cfg.frame.layout(cfg.waveform)) {
        if (cfg.receiver.kind == ReceiverKind::coherent)
            receiver_ = std::make_unique<CoherentReceiver>(bank_, layout_, cfg.receiver.coherent_options());
        else
            receiver_ = std::make_unique<NoncoherentReceiver>(bank_, layout_, cfg.receiver.noncoherent_options());
    }

    TrialOutcome run(double n0, std::uint64_t seed) const {
        Rng rng(seed);
        const Bits bits = rng.bits(cfg_.bits_per_packet());
        const Packet pkt = modulate(bits, bank_, layout_);
        const ChannelModel ch = sample_random_channel(cfg_.channel, rng.next_u64());
        const ComplexVector rx = apply_channel(pkt.baseband, ch, n0, rng);

        TrialOutcome out;
        out.bits = bits.size();
        Bits decided;
        try {
            decided = std::visit([&](const auto& r) { return r->receive(rx).bits; }, receiver_);
        } catch (const ReceiverError&) {
            // Lost packet: count it as if the receiver had output all zeros.
            out.failed = true;
            decided.assign(bits.size(), 0);
        }
        for (std::size_t i = 0; i < bits.size(); ++i) out.errors += bits[i] != decided[i];
        return out;
    }

private:
    const SweepConfig& cfg_;
    ChirpBank bank_;
    FrameLayout layout_;
    std::variant<std::unique_ptr<CoherentReceiver>, std::unique_ptr<NoncoherentReceiver>> receiver_;
};

using SweepProgress = std::function<void(const BerPoint&)>;

inline BerPoint run_point(const SweepConfig& cfg, const TrialRunner& runner, std::size_t point_index,
                          unsigned workers) {
    BerPoint pt;
    pt.snr_db = cfg.snr_db[point_index];
    pt.theory = theory_ber(cfg, pt.snr_db);
    const double n0 = noise_level(cfg, pt.snr_db);

    const std::size_t batch = std::max<std::size_t>(64, 16 * static_cast<std::size_t>(workers));
    std::vector<TrialOutcome> outcomes(batch);
    std::uint64_t next_trial = 0;
    bool done = false;
    while (!done) {
        auto work = [&](unsigned w) {
            for (std::size_t j = w; j < batch; j += workers)
                outcomes[j] = runner.run(n0, derive_seed(cfg.seed, point_index, next_trial + j));
        };
        if (workers <= 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        }
        for (const auto& o : outcomes) {
            pt.bits += o.bits;
            pt.errors += o.errors;
            pt.packets += 1;
            pt.failures += o.failed ? 1 : 0;
            if (pt.errors >= cfg.min_bit_errors || pt.bits >= cfg.max_bits) {
                done = true;
                break;
            }
        }
        next_trial += batch;
    }
    pt.ber = static_cast<double>(pt.errors) / static_cast<double>(pt.bits);
    pt.ci95 = wilson_interval(pt.errors, pt.bits);
    pt.flagged = 2 * pt.failures > pt.packets;
    return pt;
}

inline BerReport run_sweep(const SweepConfig& cfg, const SweepProgress& progress = {}) {
    cfg.validate();
    const unsigned workers = cfg.workers ? cfg.workers : std::max(1U, std::thread::hardware_concurrency());
    const TrialRunner runner(cfg);

    BerReport report;
    report.config_hash = config_hash(cfg);
    report.seed = cfg.seed;
    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
        report.points.push_back(run_point(cfg, runner, i, workers));
        if (progress) progress(report.points.back());
    }
    return report;
}

} // namespace ock
