#pragma once

#include <numbers>

namespace spdc::constants {

inline constexpr double c = 299792458.0;           // m/s
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double epsilon0 = 8.8541878128e-12; // F/m
inline constexpr double pi = std::numbers::pi;

} // namespace spdc::constants
