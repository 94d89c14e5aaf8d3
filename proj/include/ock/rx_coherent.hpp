#pragma once

// Coherent receiver: PN sync, least-squares channel estimate from the
// training block, LS equalization of each extended symbol window, then
// correlation against the chirp bank.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ock/channel.hpp"
#include "ock/detection.hpp"
#include "ock/errors.hpp"
#include "ock/framing.hpp"
#include "ock/sync.hpp"
#include "ock/waveform.hpp"

namespace ock {

inline constexpr double kConditioningFloor = 1e-8;

// (N_pn + P - 1) x P Toeplitz training matrix; column p is the PN sequence
// delayed by p chips.
inline Eigen::MatrixXcd training_matrix(std::span<const int> pn, std::size_t P) {
    const auto Np = static_cast<Eigen::Index>(pn.size());
    const auto cols = static_cast<Eigen::Index>(P);
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(Np + cols - 1, cols);
    for (Eigen::Index p = 0; p < cols; ++p)
        for (Eigen::Index i = 0; i < Np; ++i) B(i + p, p) = static_cast<double>(pn[static_cast<std::size_t>(i)]);
    return B;
}

// LS estimator for a fixed PN sequence and tap count. The factorization only
// depends on the training sequence, so it is computed once and shared.
class LsChannelEstimator {
public:
    LsChannelEstimator(std::span<const int> pn, std::size_t paths) : paths_(paths) {
        if (paths == 0) throw ConfigError("estimate_channel: P must be >= 1");
        if (pn.size() < paths)
            throw ReceiverError(ReceiverError::Kind::estimation_failure,
                                "estimate_channel: need N_pn >= P (N_pn=" + std::to_string(pn.size()) +
                                    ", P=" + std::to_string(paths) + ")");
        B_ = training_matrix(pn, paths);
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B_);
        const auto& sv = svd.singularValues();
        min_singular_ = sv(sv.size() - 1);
        if (!(min_singular_ > kConditioningFloor * sv(0)))
            throw ReceiverError(ReceiverError::Kind::estimation_failure,
                                "estimate_channel: training matrix is rank deficient or ill-conditioned");
        qr_ = B_.householderQr();
    }

    std::size_t paths() const { return paths_; }
    std::size_t input_length() const { return static_cast<std::size_t>(B_.rows()); }
    const Eigen::MatrixXcd& training() const { return B_; }

    ChannelEstimate estimate(std::span<const Complex> y_tr) const {
        if (y_tr.size() != input_length())
            throw ConfigError("estimate_channel: y_tr must have N_pn + P - 1 = " + std::to_string(input_length()) +
                              " samples");
        const Eigen::Map<const Eigen::VectorXcd> y(y_tr.data(), static_cast<Eigen::Index>(y_tr.size()));
        const Eigen::VectorXcd h = qr_.solve(y);
        ChannelEstimate est;
        est.taps.assign(h.data(), h.data() + h.size());
        est.residual_norm = (y - B_ * h).squaredNorm();
        est.condition_hint = min_singular_;
        return est;
    }

private:
    std::size_t paths_;
    Eigen::MatrixXcd B_;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr_;
    double min_singular_ = 0.0;
};

inline ChannelEstimate estimate_channel(std::span<const Complex> y_tr, std::span<const int> pn, std::size_t paths) {
    return LsChannelEstimator(pn, paths).estimate(y_tr);
}

// Statistic correlated against each chirp after equalization.
enum class CoherentMetric {
    real_part,  // Re(psi_m^H z): phase-referenced, the coherent ML decision
    magnitude   // |psi_m^H z|: phase-blind
};

// Stable solve of H_hat z = y for the (L + P - 1) x L channel matrix.
class Equalizer {
public:
    explicit Equalizer(const Eigen::MatrixXcd& H) : rows_(static_cast<std::size_t>(H.rows())) {
        if (H.rows() < H.cols() || H.cols() == 0) throw ConfigError("equalizer: channel matrix must be tall");
        qr_ = H.householderQr();
        const Eigen::VectorXd diag = qr_.matrixQR().diagonal().cwiseAbs();
        if (!(diag.minCoeff() > kConditioningFloor * diag.maxCoeff()))
            throw ReceiverError(ReceiverError::Kind::detection_failure,
                                "detect_coherent: estimated channel matrix is rank deficient");
    }

    Equalizer(std::span<const Complex> taps, std::size_t L) : Equalizer(build_H(taps, L)) {}

    std::size_t window_length() const { return rows_; }

    Eigen::VectorXcd solve(std::span<const Complex> y) const {
        if (y.size() != rows_)
            throw ConfigError("detect_coherent: window must have L + P - 1 = " + std::to_string(rows_) + " samples");
        const Eigen::Map<const Eigen::VectorXcd> v(y.data(), static_cast<Eigen::Index>(y.size()));
        return qr_.solve(v);
    }

private:
    std::size_t rows_;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr_;
};

struct SymbolDecision {
    unsigned index = 0;
    std::vector<double> metrics;
};

inline SymbolDecision correlate_equalized(const Eigen::VectorXcd& z, const ChirpBank& bank, CoherentMetric metric) {
    SymbolDecision d;
    d.metrics.resize(bank.size());
    for (unsigned m = 0; m < bank.size(); ++m) {
        const auto psi = bank.waveform(m);
        Complex c{};
        for (std::size_t n = 0; n < psi.size(); ++n) c += std::conj(psi[n]) * z(static_cast<Eigen::Index>(n));
        d.metrics[m] = metric == CoherentMetric::real_part ? c.real() : std::abs(c);
    }
    d.index = argmax_lowest(d.metrics);
    return d;
}

inline SymbolDecision detect_coherent(std::span<const Complex> y_n, const Equalizer& eq, const ChirpBank& bank,
                                      CoherentMetric metric = CoherentMetric::real_part) {
    return correlate_equalized(eq.solve(y_n), bank, metric);
}

inline SymbolDecision detect_coherent(std::span<const Complex> y_n, const Eigen::MatrixXcd& H_hat,
                                      const ChirpBank& bank, CoherentMetric metric = CoherentMetric::real_part) {
    if (static_cast<std::size_t>(H_hat.cols()) != bank.samples_per_symbol())
        throw ConfigError("detect_coherent: H_hat must have L columns");
    return detect_coherent(y_n, Equalizer(H_hat), bank, metric);
}

struct CoherentOptions {
    std::size_t paths = 4;
    CoherentMetric metric = CoherentMetric::real_part;
    double sync_threshold = 6.0;
};

// The correlation peak lands on the strongest path, which need not be the
// first. The training block is therefore fitted with 2P - 1 taps starting
// P - 1 samples before the peak, and the P-tap sub-window holding the most
// energy (earliest on ties) is kept as the channel.
class CoherentReceiver {
public:
    CoherentReceiver(const ChirpBank& bank, FrameLayout layout, CoherentOptions options = {})
        : bank_(bank),
          layout_(std::move(layout)),
          options_(options),
          estimator_(layout_.pn, extended_paths(options.paths)) {
        layout_.validate();
    }

    const CoherentOptions& options() const { return options_; }

    DetectionResult receive(std::span<const Complex> rx) const {
        const std::size_t P = options_.paths;
        const auto sync = locate_packet(rx, layout_.pn, full_window(rx.size(), layout_.pn.size()),
                                        options_.sync_threshold);

        const std::int64_t ext_start = static_cast<std::int64_t>(sync.offset) - static_cast<std::int64_t>(P - 1);
        const auto y_tr = slice_padded(rx, ext_start, estimator_.input_length());
        const auto wide = estimator_.estimate(y_tr);

        std::size_t best = 0;
        double best_energy = -1.0;
        for (std::size_t w = 0; w < P; ++w) {
            double e = 0.0;
            for (std::size_t p = 0; p < P; ++p) e += std::norm(wide.taps[w + p]);
            if (e > best_energy) {
                best_energy = e;
                best = w;
            }
        }

        DetectionResult result;
        result.sync_offset = ext_start + static_cast<std::int64_t>(best);
        ChannelEstimate est = wide;
        est.taps.assign(wide.taps.begin() + static_cast<std::ptrdiff_t>(best),
                        wide.taps.begin() + static_cast<std::ptrdiff_t>(best + P));
        result.channel = est;
        if (layout_.symbols == 0) return result;

        const std::size_t L = bank_.samples_per_symbol();
        const Equalizer eq(est.taps, L);
        const std::int64_t data_start = result.sync_offset + static_cast<std::int64_t>(layout_.header_samples());
        result.symbol_indices.reserve(layout_.symbols);
        result.metrics.reserve(layout_.symbols);
        for (std::size_t n = 0; n < layout_.symbols; ++n) {
            const auto y_n = slice_padded(rx, data_start + static_cast<std::int64_t>(n * L), L + P - 1);
            auto d = detect_coherent(y_n, eq, bank_, options_.metric);
            result.symbol_indices.push_back(d.index);
            result.metrics.push_back(std::move(d.metrics));
        }
        result.bits = symbols_to_bits(result.symbol_indices, bank_);
        return result;
    }

private:
    static std::size_t extended_paths(std::size_t paths) {
        if (paths == 0) throw ConfigError("coherent receiver: P must be >= 1");
        return 2 * paths - 1;
    }

    ChirpBank bank_;
    FrameLayout layout_;
    CoherentOptions options_;
    LsChannelEstimator estimator_;
};

inline DetectionResult receive_packet_coherent(std::span<const Complex> rx, const ChirpBank& bank,
                                               const FrameLayout& layout, CoherentOptions options = {}) {
    return CoherentReceiver(bank, layout, options).receive(rx);
}

inline DetectionResult receive_packet_coherent(std::span<const Complex> rx, const ChirpBank& bank,
                                               const FrameLayout& layout, std::size_t paths) {
    CoherentOptions options;
    options.paths = paths;
    return receive_packet_coherent(rx, bank, layout, options);
}

} // namespace ock
