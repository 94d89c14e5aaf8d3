#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ock/types.hpp"

namespace ock {

struct ChannelEstimate {
    ComplexVector taps;
    double residual_norm = 0.0;    // ||y_tr - B_tr h_hat||^2
    double condition_hint = 0.0;   // smallest singular value of B_tr
};

struct DetectionResult {
    std::vector<unsigned> symbol_indices;
    Bits bits;
    std::vector<std::vector<double>> metrics;  // one row of M scores per symbol
    std::int64_t sync_offset = 0;
    std::optional<ChannelEstimate> channel;
};

// Lowest index wins on ties.
inline unsigned argmax_lowest(std::span<const double> scores) {
    unsigned best = 0;
    for (unsigned m = 1; m < scores.size(); ++m)
        if (scores[m] > scores[best]) best = m;
    return best;
}

// Copy of rx[start, start + length), zero outside the buffer.
inline ComplexVector slice_padded(std::span<const Complex> rx, std::int64_t start, std::size_t length) {
    ComplexVector out(length, Complex{});
    for (std::size_t i = 0; i < length; ++i) {
        const std::int64_t idx = start + static_cast<std::int64_t>(i);
        if (idx >= 0 && idx < static_cast<std::int64_t>(rx.size())) out[i] = rx[static_cast<std::size_t>(idx)];
    }
    return out;
}

} // namespace ock
