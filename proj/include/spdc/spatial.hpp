#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "spdc/spectra.hpp"

namespace spdc {

/// One explicit structure, or an analytic family (ensembles give a mean density only).
using SpatialSource = std::variant<PolingStructure, AnalyticFamily>;

bool is_ensemble(const SpatialSource& src);
std::string source_label(const SpatialSource& src);

/// Closed-form transverse transform of the normalized Gaussian pump
/// E(x,y) = exp(-(x/dx)^2 - (y/dy)^2) / (pi dx dy); equals 1 at the origin.
cplx pump_transverse_spectrum(double dkx, double dky, const ProcessConfig& cfg);

/// Phi = i |g| xi_p F(Dk_z) Phi_xy(Dk_x, Dk_y); deterministic sources only.
cplx spatial_amplitude(const SpatialSource& src, const ProcessConfig& cfg,
                       const DispersionModel& model, double omega_s, double omega_i,
                       double theta_s, double phi_s, double theta_i, double phi_i);
/// |Phi|^2, or its ensemble mean for a random family.
double spatial_density(const SpatialSource& src, const ProcessConfig& cfg,
                       const DispersionModel& model, double omega_s, double omega_i,
                       double theta_s, double phi_s, double theta_i, double phi_i);

/// Quadrature settings. The pump is spectrally flat over a narrow band and
/// the idler frequency follows as omega_p - omega_s.
struct SpatialGrids {
    /// pump band full width in wavelength (m) and its Gauss-Legendre node count
    double pump_band = 0.1e-9;
    std::size_t pump_band_points = 3;

    /// signal frequency axis: omega_s0 (1 +- span)
    double signal_span = 0.5;
    std::size_t signal_points = 256;

    /// signal angle axis of the (omega_s, theta_s) map
    double theta_s_max = 50e-3;
    std::size_t theta_s_points = 51;
    double phi_s = 0.0;

    /// Idler directions for the signal map are integrated in transverse coordinates
    /// (sin th sin ph, sin th cos ph) on a box centred on the transversely matched
    /// direction, half-width idler_extent pump-limited standard deviations.
    double idler_extent = 5.0;
    std::size_t idler_points = 25;

    /// idler grid of the correlated-area map
    double theta_i_max = 50e-3;
    std::size_t theta_i_points = 128;
    std::size_t phi_i_points = 64;

    /// fixed signal direction of the correlated area
    double theta_s_fixed = 0.0;
    double phi_s_fixed = 0.0;

    /// run the grid-doubling check on up to this many rows (0 disables it)
    std::size_t convergence_rows = 6;
    double convergence_tolerance = 0.05;

    void validate() const;
};

/// values[r * cols.size() + c]; rows x cols.
struct AngularDensityMap {
    std::string row_name;
    std::string col_name;
    std::vector<double> rows;
    std::vector<double> cols;
    std::vector<double> values;
    /// maximum of the unnormalized values
    double peak = 0.0;
    /// largest relative change seen in the grid-doubling check (NaN if not run)
    double convergence_error = 0.0;
    std::vector<std::string> warnings;

    double at(std::size_t r, std::size_t c) const { return values[r * cols.size() + c]; }
};

/// s_s(omega_s, theta_s) at phi_s, sin-measure factors included; rows theta_s, cols omega_s.
AngularDensityMap angular_spectral_density(const SpatialSource& src, const ProcessConfig& cfg,
                                           const DispersionModel& model, const SpatialGrids& g,
                                           unsigned threads = 0);

struct RadialProfile {
    std::vector<double> theta;
    /// normalized to the maximum
    std::vector<double> values;
    double peak = 0.0;
    double convergence_error = 0.0;
    std::vector<std::string> warnings;
};

/// n_s(theta_s) = int d omega_s s_s.
RadialProfile radial_photon_density(const AngularDensityMap& map);

/// Idler probability g_i(theta_i, phi_i) for the fixed signal direction; rows theta_i, cols phi_i.
/// An on-axis signal makes the sin(theta_s) factor a constant and it is dropped.
AngularDensityMap correlated_area(const SpatialSource& src, const ProcessConfig& cfg,
                                  const DispersionModel& model, const SpatialGrids& g,
                                  unsigned threads = 0);

/// Density per solid angle g_i / sin(theta_i) along the cut through the axis
/// phi_i = 180 deg (theta > 0) and phi_i = 0 deg (theta < 0); theta is signed.
RadialProfile correlated_profile(const SpatialSource& src, const ProcessConfig& cfg,
                                 const DispersionModel& model, const SpatialGrids& g,
                                 const std::vector<double>& theta, unsigned threads = 0);

/// Signed cut symmetric about zero with 2 half_points - 1 samples.
std::vector<double> signed_theta_grid(double theta_max, std::size_t half_points);

struct CorrelatedWidth {
    double pump_width;
    double width;
    double convergence_error;
};

/// Radial FWHM of the correlated area for each pump width (dx = dy); the cut extends to
/// extent_factor times the transverse estimate 2 sqrt(2 ln 2) / (k_i w).
std::vector<CorrelatedWidth> correlated_width_scan(const SpatialSource& src,
                                                   const ProcessConfig& cfg,
                                                   const DispersionModel& model,
                                                   const SpatialGrids& g,
                                                   const std::vector<double>& pump_widths,
                                                   double extent_factor = 3.0,
                                                   std::size_t half_points = 121,
                                                   unsigned threads = 0);

/// True when the row has two maxima on either side of omega_s0 that exceed the value
/// at omega_s0 by more than min_contrast (relative to the row maximum).
bool has_spectral_splitting(const AngularDensityMap& map, std::size_t row,
                            double min_contrast = 0.1);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

} // namespace spdc
