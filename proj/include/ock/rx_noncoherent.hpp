#pragma once

// Non-coherent square-law detector. No channel estimate, no equalization:
// each length-L window is correlated against the in-phase and quadrature
// parts of every chirp and the envelope energies are compared.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ock/detection.hpp"
#include "ock/errors.hpp"
#include "ock/framing.hpp"
#include "ock/sync.hpp"
#include "ock/waveform.hpp"

namespace ock {

enum class EnvelopeForm {
    // |psi_m^H y|^2: the cosine/sine correlator pair evaluated on complex
    // baseband. Phase invariant and orthogonal across the bank.
    matched,
    // |Re(psi_m)^T y|^2 + |Im(psi_m)^T y|^2 with plain transposes. On a
    // complex y this equals (|psi_m^H y|^2 + |psi_m^T y|^2) / 2, so it also
    // picks up the mirrored (conjugate) chirp.
    literal
};

struct EnvelopeMetrics {
    std::vector<double> scores;
};

struct NoncoherentDecision {
    unsigned index = 0;
    EnvelopeMetrics metrics;
};

inline double envelope_score(std::span<const Complex> psi, std::span<const Complex> y, EnvelopeForm form) {
    if (form == EnvelopeForm::matched) {
        Complex c{};
        for (std::size_t n = 0; n < psi.size(); ++n) c += std::conj(psi[n]) * y[n];
        return std::norm(c);
    }
    Complex in_phase{}, quadrature{};
    for (std::size_t n = 0; n < psi.size(); ++n) {
        in_phase += psi[n].real() * y[n];
        quadrature += psi[n].imag() * y[n];
    }
    return std::norm(in_phase) + std::norm(quadrature);
}

inline NoncoherentDecision detect_noncoherent(std::span<const Complex> y_tilde, const ChirpBank& bank,
                                              EnvelopeForm form = EnvelopeForm::matched) {
    if (y_tilde.size() != bank.samples_per_symbol())
        throw ConfigError("detect_noncoherent: window must have L = " + std::to_string(bank.samples_per_symbol()) +
                          " samples");
    NoncoherentDecision d;
    d.metrics.scores.resize(bank.size());
    for (unsigned m = 0; m < bank.size(); ++m) d.metrics.scores[m] = envelope_score(bank.waveform(m), y_tilde, form);
    d.index = argmax_lowest(d.metrics.scores);
    return d;
}

struct NoncoherentOptions {
    EnvelopeForm form = EnvelopeForm::matched;
    double sync_threshold = 6.0;
};

class NoncoherentReceiver {
public:
    NoncoherentReceiver(const ChirpBank& bank, FrameLayout layout, NoncoherentOptions options = {})
        : bank_(bank), layout_(std::move(layout)), options_(options) {
        layout_.validate();
    }

    DetectionResult receive(std::span<const Complex> rx) const {
        const auto sync = locate_packet(rx, layout_.pn, full_window(rx.size(), layout_.pn.size()),
                                        options_.sync_threshold);
        DetectionResult result;
        result.sync_offset = static_cast<std::int64_t>(sync.offset);

        const std::size_t L = bank_.samples_per_symbol();
        const std::int64_t data_start = result.sync_offset + static_cast<std::int64_t>(layout_.header_samples());
        for (std::size_t n = 0; n < layout_.symbols; ++n) {
            const auto y = slice_padded(rx, data_start + static_cast<std::int64_t>(n * L), L);
            auto d = detect_noncoherent(y, bank_, options_.form);
            result.symbol_indices.push_back(d.index);
            result.metrics.push_back(std::move(d.metrics.scores));
        }
        result.bits = symbols_to_bits(result.symbol_indices, bank_);
        return result;
    }

private:
    ChirpBank bank_;
    FrameLayout layout_;
    NoncoherentOptions options_;
};

inline DetectionResult receive_packet_noncoherent(std::span<const Complex> rx, const ChirpBank& bank,
                                                  const FrameLayout& layout, NoncoherentOptions options = {}) {
    return NoncoherentReceiver(bank, layout, options).receive(rx);
}

} // namespace ock
