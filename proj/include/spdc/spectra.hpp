#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdc/dispersion.hpp"
#include "spdc/phasematch.hpp"
#include "spdc/random.hpp"
#include "spdc/structures.hpp"

namespace spdc {

enum class PumpType { cw, pulsed_spectrum };

/// Pump and coupling parameters. SI units throughout.
struct ProcessConfig {
    double pump_wavelength = 775e-9;
    /// cw amplitude xi_p (V s/m)
    double pump_amplitude = 1.0;
    PumpType pump_type = PumpType::cw;
    /// chi^(2) (m/V)
    double chi2 = 50e-12;
    /// transverse area B (m^2)
    double beam_area = 1e-8;
    double pump_dx = 1e-5;
    double pump_dy = 1e-5;
    double eta_sum = 1.0;

    double omega_p() const;
    /// degenerate signal frequency omega_p / 2
    double omega_s0() const { return 0.5 * omega_p(); }
    void validate() const;
};

/// Uniform signal grid symmetric about omega_s0; sample j pairs with the idler
/// omega_i = omega_p - omega_s, which is exactly the signal sample M-1-j.
struct SpectralGrid {
    std::vector<double> omega_s;
    double omega_p = 0.0;

    /// omega_s = omega_s0 (1 + rel_span t), t uniform on [-1, 1].
    static SpectralGrid centered(double omega_s0, double rel_span, std::size_t M);

    std::size_t size() const { return omega_s.size(); }
    double step() const { return omega_s[1] - omega_s[0]; }
    double omega_i(std::size_t j) const { return omega_s[size() - 1 - j]; }
    std::size_t mirror(std::size_t j) const { return size() - 1 - j; }
    double omega_s0() const { return 0.5 * omega_p; }
    void validate() const;
};

/// Default grid: +-50% about omega_s0 with 4096 samples.
inline constexpr double default_relative_span = 0.5;
inline constexpr std::size_t default_grid_points = 4096;

/// Total mismatch Dk(omega_s, omega_p - omega_s) on the grid; exactly mirror symmetric.
std::vector<double> mismatch_on_grid(const DispersionModel& model, const SpectralGrid& grid);

/// |g|^2 = omega_s omega_i chi2^2 / (4 c^2 pi^2 n_s n_i) on the grid.
std::vector<double> coupling_squared(const DispersionModel& model, const ProcessConfig& cfg,
                                     const SpectralGrid& grid);

/// Phi(omega_s, omega_p - omega_s) = g xi_p F(Dk) on a grid.
struct SpectralSlice {
    SpectralGrid grid;
    std::vector<cplx> values;
    std::vector<double> delta_k;
};

SpectralSlice two_photon_amplitude(const PolingStructure& s, const ProcessConfig& cfg,
                                   const DispersionModel& model, const SpectralGrid& grid);
/// Deterministic families only (ideal, chirped); ensembles have no single amplitude.
SpectralSlice two_photon_amplitude(const AnalyticFamily& fam, const ProcessConfig& cfg,
                                   const DispersionModel& model, const SpectralGrid& grid);

/// n(omega_s) = |g|^2 |xi_p|^2 <|F|^2> along the cw slice.
struct DensitySlice {
    SpectralGrid grid;
    std::vector<double> values;
};

DensitySlice joint_density(const SpectralSlice& slice);
/// Analytic ensemble mean.
DensitySlice joint_density(const AnalyticFamily& fam, const ProcessConfig& cfg,
                           const DispersionModel& model, const SpectralGrid& grid);

struct MonteCarloDensity {
    DensitySlice mean;
    std::vector<double> standard_error;
    std::size_t realizations = 0;
};

/// Monte Carlo mean of |Phi|^2 over explicit realizations of spec.
MonteCarloDensity joint_density_mc(const StructureSpec& spec, const ProcessConfig& cfg,
                                   const DispersionModel& model, const SpectralGrid& grid,
                                   std::size_t realizations, const RandomSource& src,
                                   unsigned threads = 0);

enum class SpectrumNormalization { absolute, unit_photon };

struct Spectrum {
    std::vector<double> omega_s;
    std::vector<double> values;
};

/// S_s = hbar omega_s n(omega_s); unit_photon scales so that int S_s/(hbar omega_s) = 1.
Spectrum signal_spectrum(const DensitySlice& d,
                         SpectrumNormalization norm = SpectrumNormalization::absolute);

/// N = int n(omega_s) d omega_s (trapezoid over the grid band).
double pair_rate(const DensitySlice& d);

/// Trapezoid rule on sampled data.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

/// Distance between the outermost half-maximum crossings (linear interpolation).
/// Throws DomainError("span too narrow") when a side has no crossing on the grid.
double fwhm(const std::vector<double>& x, const std::vector<double>& y);

struct EnsembleStats {
    std::string name;
    double mean = 0.0;
    double variance = 0.0;
    /// sqrt(variance) / mean
    double relative_fluctuation = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::size_t realizations = 0;
    std::size_t failures = 0;
    std::uint64_t seed = 0;
    /// per-realization values (NaN where the extractor failed), index order
    std::vector<double> samples;
};

/// Everything an extractor may look at for one realization.
struct RealizationView {
    const PolingStructure& structure;
    const SpectralSlice& slice;
    const DensitySlice& density;
};

struct Observable {
    std::string name;
    std::function<double(const RealizationView&)> extract;
};

/// Pair rate N of the realization.
Observable rate_observable();
/// FWHM of the signal spectrum in omega_s.
Observable width_observable();

struct EnsembleOptions {
    std::size_t realizations = 1000;
    std::size_t histogram_bins = 40;
    unsigned threads = 0;
    /// fraction of failed realizations above which the run fails
    double max_failure_fraction = 0.01;
};

/// Realization r uses the stream substream(src, r); results do not depend on threads.
std::vector<EnsembleStats> ensemble_run(const StructureSpec& spec, const ProcessConfig& cfg,
                                        const DispersionModel& model, const SpectralGrid& grid,
                                        const std::vector<Observable>& observables,
                                        const RandomSource& src, const EnsembleOptions& opt);

/// Realization r is gen(rng) with rng seeded from substream(src, r).
using StructureGenerator = std::function<PolingStructure(Rng&)>;
std::vector<EnsembleStats> ensemble_run(const StructureGenerator& gen, const ProcessConfig& cfg,
                                        const DispersionModel& model, const SpectralGrid& grid,
                                        const std::vector<Observable>& observables,
                                        const RandomSource& src, const EnsembleOptions& opt);

/// Statistics of an already collected sample (NaNs count as failures).
EnsembleStats summarize(const std::string& name, const std::vector<double>& samples,
                        std::size_t bins, std::uint64_t seed);

enum class MatchTarget { equal_width, equal_rate };

std::string match_target_name(MatchTarget t);
MatchTarget match_target_from_name(const std::string& name);

struct MatchSolverConfig {
    double sigma_min = 0.05e-6;
    double sigma_max = 4e-6;
    double rel_tol = 1e-2;
    std::size_t N_L = 700;
    double l0 = 0.0;
};

struct MatchRow {
    double zeta = 0.0;
    bool matched = false;
    double sigma = 0.0;
    double chirp_width = 0.0;
    double chirp_rate = 0.0;
    double rps_width = 0.0;
    double rps_rate = 0.0;
    /// N_rps / N_chirp
    double rate_ratio = 0.0;
    /// width_rps / width_chirp
    double width_ratio = 0.0;
};

/// For each zeta, bisection on sigma so the RPS ensemble mean width (or rate) equals the
/// chirped value. Ensemble means come from the analytic average.
std::vector<MatchRow> match_parameter(MatchTarget target, const std::vector<double>& zetas,
                                      const MatchSolverConfig& solver, const ProcessConfig& cfg,
                                      const DispersionModel& model, const SpectralGrid& grid);

/// Width and rate of an analytic family's mean density.
struct WidthRate {
    double width;
    double rate;
};
WidthRate analytic_width_rate(const AnalyticFamily& fam, const ProcessConfig& cfg,
                              const DispersionModel& model, const SpectralGrid& grid);

} // namespace spdc
