#include "spdc/complex_erf.hpp"

#include <array>
#include <cmath>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

constexpr double weideman_L = 5.3182958969449885;

// highest power first
constexpr std::array<double, 40> weideman_a = {
    -1.73569809987918647e-15,
    1.20167491075928095e-15,
    1.15191702207494847e-14,
    -5.23171636632440398e-15,
    -7.07108802215940845e-14,
    1.37782240476640457e-14,
    4.53414489094346555e-13,
    1.20333095291956798e-13,
    -2.90771851041427015e-12,
    -2.72777356258302445e-12,
    1.77141856738671790e-11,
    3.47274209389070152e-11,
    -9.05513886095832302e-11,
    -3.56323504036026841e-10,
    2.10859907312510581e-10,
    3.01778042555156406e-09,
    3.24974658294507890e-09,
    -1.83156168342968342e-08,
    -6.35177348301541098e-08,
    1.41986423729534295e-08,
    5.91213695302905726e-07,
    1.48356611331720142e-06,
    -1.06601389841627292e-06,
    -1.80074471447234073e-05,
    -5.59130926423487940e-05,
    -3.93936314548380510e-05,
    4.39807015986967025e-04,
    2.70540563307372899e-03,
    1.00481862427835352e-02,
    2.92029164712418812e-02,
    7.18236177907432827e-02,
    1.55042638024795038e-01,
    2.99894379961500590e-01,
    5.26652898827708604e-01,
    8.47217457659381501e-01,
    1.25638156757651331e+00,
    1.72538308481797786e+00,
    2.20151379487831189e+00,
    2.61605415276185971e+00,
    2.89962450938970484e+00
};

constexpr double inv_sqrt_pi = 0.56418958354775628695;
constexpr double two_over_sqrt_pi = 1.12837916709551257390;
constexpr double overflow_exponent = 700.0;

std::complex<double> erf_series(std::complex<double> z)
{
    // erf(z) = 2/sqrt(pi) sum (-1)^n z^(2n+1) / (n! (2n+1))
    const std::complex<double> z2 = z * z;
    std::complex<double> term = z;
    std::complex<double> sum = z;
    for (int n = 1; n < 60; ++n) {
        term *= -z2 / static_cast<double>(n);
        const std::complex<double> add = term / static_cast<double>(2 * n + 1);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum))
            break;
    }
    return two_over_sqrt_pi * sum;
}

} // namespace

std::complex<double> faddeeva_w_upper(std::complex<double> z)
{
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> den = weideman_L - i * z;
    const std::complex<double> Z = (weideman_L + i * z) / den;
    std::complex<double> p = 0.0;
    for (double a : weideman_a)
        p = p * Z + a;
    return 2.0 * p / (den * den) + inv_sqrt_pi / den;
}

std::complex<double> complex_erf(std::complex<double> z)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("complex_erf: non-finite argument");
    if (std::abs(z) < 1.0)
        return erf_series(z);
    if (z.real() < 0.0)
        return -complex_erf(-z);
    const double x = z.real();
    const double y = z.imag();
    if (y * y - x * x > overflow_exponent)
        throw DomainError("complex_erf: argument in overflow region");
    const std::complex<double> i(0.0, 1.0);
    return 1.0 - std::exp(-z * z) * faddeeva_w_upper(i * z);
}

} // namespace spdc
