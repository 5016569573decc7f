#pragma once

#include <complex>

namespace spdc {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0
/// (Weideman rational expansion, 40 terms).
std::complex<double> faddeeva_w_upper(std::complex<double> z);

/// erf(z) to ~1e-12 relative. Power series for |z| < 1, otherwise
/// erf(z) = 1 - exp(-z^2) w(iz) after reflecting into Re z >= 0.
/// Throws DomainError where the result overflows (Im(z)^2 - Re(z)^2 > 700).
std::complex<double> complex_erf(std::complex<double> z);

} // namespace spdc
