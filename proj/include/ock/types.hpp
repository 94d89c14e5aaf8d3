#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace ock {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using Bits = std::vector<std::uint8_t>;

inline constexpr double kPi = 3.14159265358979323846;

} // namespace ock
