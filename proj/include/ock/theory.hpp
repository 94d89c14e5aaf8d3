#pragma once

// Closed-form BER references and binomial confidence intervals.
//
// SNR convention: es_n0 = E / N0 with E the symbol energy and N0 the total
// complex noise variance per sample. Eb / N0 = es_n0 / log2(M).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ock {

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

namespace detail {

inline double bits_per_symbol_checked(unsigned M, double es_n0) {
    if (M < 2 || !std::has_single_bit(M)) throw std::domain_error("M must be a power of two >= 2");
    if (!(es_n0 >= 0.0)) throw std::domain_error("E/N0 must be non-negative");
    return static_cast<double>(std::countr_zero(M));
}

} // namespace detail

// Q(sqrt(E / (log2(M) N0)))
inline double theory_ber_coherent(double es_n0, unsigned M) {
    const double k = detail::bits_per_symbol_checked(M, es_n0);
    return q_function(std::sqrt(es_n0 / k));
}

// exp(-E / (2 log2(M) N0)) / 2
inline double theory_ber_noncoherent(double es_n0, unsigned M) {
    const double k = detail::bits_per_symbol_checked(M, es_n0);
    return 0.5 * std::exp(-es_n0 / (2.0 * k));
}

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Wilson score interval for `errors` successes in `trials`; z = 1.96 is the
// 95% two-sided interval, z = 3 the 99.7% one.
inline Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.96) {
    if (trials == 0) return {0.0, 1.0};
    if (errors > trials) throw std::domain_error("wilson_interval: errors > trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

} // namespace ock
