#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ock/errors.hpp"
#include "ock/types.hpp"

namespace ock {

// Half-open range of candidate packet start offsets.
struct SearchWindow {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool empty() const { return end <= begin; }
};

// Every start offset at which the whole PN header still fits inside rx.
inline SearchWindow full_window(std::size_t rx_size, std::size_t pn_size) {
    return {0, rx_size >= pn_size ? rx_size - pn_size + 1 : 0};
}

// |sum_i pn[i] rx[d + i]| for each d in the window.
inline std::vector<double> pn_correlation(std::span<const Complex> rx, std::span<const int> pn, SearchWindow window) {
    std::vector<double> out;
    if (window.empty()) return out;
    out.reserve(window.end - window.begin);
    for (std::size_t d = window.begin; d < window.end; ++d) {
        double re = 0.0, im = 0.0;
        const std::size_t n = std::min(pn.size(), rx.size() > d ? rx.size() - d : 0);
        for (std::size_t i = 0; i < n; ++i) {
            re += pn[i] * rx[d + i].real();
            im += pn[i] * rx[d + i].imag();
        }
        out.push_back(std::hypot(re, im));
    }
    return out;
}

struct SyncResult {
    std::size_t offset = 0;
    double peak = 0.0;
    double floor = 0.0;  // threshold_factor * median |correlation|
};

inline SyncResult locate_packet(std::span<const Complex> rx, std::span<const int> pn, SearchWindow window,
                                double threshold_factor = 6.0) {
    if (rx.size() < pn.size()) throw ReceiverError(ReceiverError::Kind::no_packet, "sync: rx shorter than PN header");
    window.end = std::min(window.end, rx.size() - pn.size() + 1);
    if (window.empty()) throw ReceiverError(ReceiverError::Kind::no_packet, "sync: empty search window");

    const auto corr = pn_correlation(rx, pn, window);
    // max_element returns the first maximum, so ties resolve to the earliest offset.
    const auto peak_it = std::max_element(corr.begin(), corr.end());

    auto sorted = corr;
    const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());

    SyncResult result;
    result.offset = window.begin + static_cast<std::size_t>(peak_it - corr.begin());
    result.peak = *peak_it;
    result.floor = threshold_factor * *mid;
    if (!(result.peak > result.floor))
        throw ReceiverError(ReceiverError::Kind::no_packet,
                            "sync: no packet found (peak " + std::to_string(result.peak) + " <= floor " +
                                std::to_string(result.floor) + ")");
    return result;
}

inline std::size_t synchronize(std::span<const Complex> rx, std::span<const int> pn, SearchWindow window,
                               double threshold_factor = 6.0) {
    return locate_packet(rx, pn, window, threshold_factor).offset;
}

} // namespace ock
