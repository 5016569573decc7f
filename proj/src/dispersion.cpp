#include "spdc/dispersion.hpp"

#include <cmath>
#include <cstdio>

#include "spdc/constants.hpp"
#include "spdc/errors.hpp"

namespace spdc {

SellmeierCoefficients jundt_congruent_e()
{
    return {5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2,
            4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5};
}

std::string material_name(Material m)
{
    switch (m) {
    case Material::lithium_niobate_congruent_e:
        return "lithium-niobate-congruent-e";
    }
    return "unknown";
}

Material material_from_name(const std::string& name)
{
    if (name == "lithium-niobate-congruent-e" || name == "LiNbO3")
        return Material::lithium_niobate_congruent_e;
    throw ParameterError("unknown material '" + name + "'");
}

double omega_from_wavelength(double lambda)
{
    if (!(lambda > 0.0))
        throw DomainError("wavelength must be positive");
    return 2.0 * constants::pi * constants::c / lambda;
}

double wavelength_from_omega(double omega)
{
    if (!(omega > 0.0))
        throw DomainError("angular frequency must be positive");
    return 2.0 * constants::pi * constants::c / omega;
}

DispersionModel::DispersionModel(double temperature_K, Material material)
    : DispersionModel(temperature_K, material, jundt_congruent_e())
{
}

DispersionModel::DispersionModel(double temperature_K, Material material,
                                 const SellmeierCoefficients& coeffs)
    : temperature_(temperature_K), material_(material), coeffs_(coeffs)
{
    if (!(temperature_K > 0.0) || !std::isfinite(temperature_K))
        throw DomainError("temperature must be a positive number of kelvin");
}

double DispersionModel::refractive_index(double omega) const
{
    const double lambda = 2.0 * constants::pi * constants::c / omega;
    if (!(omega > 0.0) || !(lambda >= band_min_wavelength * (1.0 - 1e-12)) ||
        !(lambda <= band_max_wavelength * (1.0 + 1e-12))) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "wavelength %.6g nm outside the supported band 400-4000 nm",
                      lambda * 1e9);
        throw DomainError(buf);
    }
    const auto& a = coeffs_;
    const double tc = temperature_ - 273.15;
    const double f = (tc - 24.5) * (tc + 570.82);
    const double l2 = (lambda * 1e6) * (lambda * 1e6);
    const double a3 = a[2] + a[8] * f;
    const double n2 = a[0] + a[6] * f + (a[1] + a[7] * f) / (l2 - a3 * a3) +
                      (a[3] + a[9] * f) / (l2 - a[4] * a[4]) - a[5] * l2;
    if (!(n2 > 1.0))
        throw DomainError("Sellmeier form gives n <= 1");
    return std::sqrt(n2);
}

double DispersionModel::wavenumber(double omega) const
{
    return refractive_index(omega) * omega / constants::c;
}

DispersionModel DispersionModel::at_temperature(double temperature_K) const
{
    return DispersionModel(temperature_K, material_, coeffs_);
}

double refractive_index(const DispersionModel& model, double omega)
{
    return model.refractive_index(omega);
}

double collinear_mismatch(const DispersionModel& model, double omega_s, double omega_i)
{
    if (!(omega_s > 0.0) || !(omega_i > 0.0))
        throw DomainError("signal and idler frequencies must be positive");
    return model.wavenumber(omega_s + omega_i) -
           (model.wavenumber(omega_s) + model.wavenumber(omega_i));
}

double qpm_period_from_mismatch(double dk0)
{
    if (!(dk0 > 0.0))
        throw DomainError("phase mismatch must be positive for first-order quasi-phase-matching");
    return constants::pi / dk0;
}

double qpm_period(const DispersionModel& model, double omega_s0, double omega_i0)
{
    return qpm_period_from_mismatch(collinear_mismatch(model, omega_s0, omega_i0));
}

MismatchVector vector_mismatch(const DispersionModel& model, double omega_s, double omega_i,
                               double theta_s, double phi_s, double theta_i, double phi_i)
{
    if (!std::isfinite(theta_s) || !std::isfinite(phi_s) || !std::isfinite(theta_i) ||
        !std::isfinite(phi_i))
        throw DomainError("emission angles must be finite");
    if (!(omega_s > 0.0) || !(omega_i > 0.0))
        throw DomainError("signal and idler frequencies must be positive");
    const double ks = model.wavenumber(omega_s);
    const double ki = model.wavenumber(omega_i);
    const double kp = model.wavenumber(omega_s + omega_i);
    MismatchVector v;
    v.x = ks * std::sin(theta_s) * std::sin(phi_s) + ki * std::sin(theta_i) * std::sin(phi_i);
    v.y = ks * std::sin(theta_s) * std::cos(phi_s) + ki * std::sin(theta_i) * std::cos(phi_i);
    v.z = kp - (ks * std::cos(theta_s) + ki * std::cos(theta_i));
    return v;
}

} // namespace spdc
