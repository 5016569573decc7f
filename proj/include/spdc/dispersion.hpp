#pragma once

#include <array>
#include <string>

namespace spdc {

enum class Material { lithium_niobate_congruent_e };

/// Coefficients of the temperature-dependent Sellmeier form
///   n^2 = a1 + b1 f + (a2 + b2 f)/(L^2 - (a3 + b3 f)^2) + (a4 + b4 f)/(L^2 - a5^2) - a6 L^2
/// with L the vacuum wavelength in um and f = (T - 24.5)(T + 570.82), T in Celsius.
/// Order: a1..a6, b1..b4.
using SellmeierCoefficients = std::array<double, 10>;

/// Jundt, Opt. Lett. 22, 1553 (1997), congruent LiNbO3, extraordinary wave.
SellmeierCoefficients jundt_congruent_e();

std::string material_name(Material m);
Material material_from_name(const std::string& name);

inline constexpr double band_min_wavelength = 0.4e-6;
inline constexpr double band_max_wavelength = 4.0e-6;

double omega_from_wavelength(double lambda);
double wavelength_from_omega(double omega);

class DispersionModel {
public:
    explicit DispersionModel(double temperature_K = 297.0,
                             Material material = Material::lithium_niobate_congruent_e);
    DispersionModel(double temperature_K, Material material, const SellmeierCoefficients& coeffs);

    double temperature() const { return temperature_; }
    Material material() const { return material_; }
    const SellmeierCoefficients& coefficients() const { return coeffs_; }

    /// Extraordinary refractive index at angular frequency omega (rad/s).
    double refractive_index(double omega) const;
    /// k = n omega / c.
    double wavenumber(double omega) const;

    DispersionModel at_temperature(double temperature_K) const;

private:
    double temperature_;
    Material material_;
    SellmeierCoefficients coeffs_;
};

/// Free-function forms of the model queries.
double refractive_index(const DispersionModel& model, double omega);

/// dk = k_p(ws + wi) - k_s(ws) - k_i(wi).
double collinear_mismatch(const DispersionModel& model, double omega_s, double omega_i);

/// l0 = pi / dk0 for the design point.
double qpm_period(const DispersionModel& model, double omega_s0, double omega_i0);
double qpm_period_from_mismatch(double dk0);

struct MismatchVector {
    double x;
    double y;
    double z;
};

/// Cartesian mismatch for normal pump incidence; x uses sin(phi), y uses cos(phi).
MismatchVector vector_mismatch(const DispersionModel& model, double omega_s, double omega_i,
                               double theta_s, double phi_s, double theta_i, double phi_i);

} // namespace spdc
