#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spdc/spectra.hpp"

namespace spdc {

/// Symmetric delay grid; an odd count puts tau = 0 on a sample.
std::vector<double> tau_grid(double half_span = 500e-15, std::size_t n = 4097);

struct TemporalTrace {
    std::vector<double> tau;
    std::vector<double> values;
    /// HOM: R_0; sum frequency: area before normalization
    double normalization = 0.0;
};

/// Normalized coincidence rate R_n = 1 - rho for one realization (cw pump).
TemporalTrace hom_trace(const SpectralSlice& slice, const std::vector<double>& tau,
                        unsigned threads = 0);
/// Ensemble trace from the analytic cross-correlator of the family.
TemporalTrace hom_trace_ensemble(const AnalyticFamily& fam, const ProcessConfig& cfg,
                                 const DispersionModel& model, const SpectralGrid& grid,
                                 const std::vector<double>& tau, unsigned threads = 0);

/// FWHM of the dip 1 - R_n; throws DomainError("no dip") below depth 0.1.
double entanglement_time(const TemporalTrace& hom);

/// Max |R_n' - R_n| over tau after multiplying Phi by exp(i(phase(ws) + phase(wi))).
double dispersion_cancellation_check(const SpectralSlice& slice,
                                     const std::function<double(double)>& phase,
                                     const std::vector<double>& tau, unsigned threads = 0);

struct PhaseProfile {
    std::vector<double> omega_s;
    /// unwrapped arg(Phi) on the high-weight samples, NaN elsewhere
    std::vector<double> phase;
    std::vector<double> weights;
    /// [first, last] index ranges of contiguous high-weight samples
    std::vector<std::pair<std::size_t, std::size_t>> segments;
};

/// Samples below rel_threshold of the peak |Phi|^2 are excluded.
PhaseProfile spectral_phase(const SpectralSlice& slice, double rel_threshold = 1e-3);

/// phi ~ c1 x + c2 x^2 with x = (omega_s - omega_s0)/omega_s0, plus one offset per segment.
struct QuadraticPhaseFit {
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<double> offsets;
    /// weighted RMS residual (rad)
    double residual_rms = 0.0;
};

QuadraticPhaseFit fit_quadratic_phase(const PhaseProfile& p, double omega_s0);

enum class CompensationMode { none, quadratic, quadratic_ls, ideal };

std::string compensation_name(CompensationMode m);
CompensationMode compensation_from_name(const std::string& name);

struct CompensationResult {
    SpectralSlice slice;
    CompensationMode mode = CompensationMode::none;
    /// applied phase -(c1 x + c2 x^2); zero for none / ideal
    double c1 = 0.0;
    double c2 = 0.0;
    /// least-squares c2 before peak refinement
    double c2_least_squares = 0.0;
};

/// quadratic: least-squares seed, then c2 refined to maximize the sum-frequency peak on tau.
CompensationResult compensate(const SpectralSlice& slice, CompensationMode mode,
                              const std::vector<double>& tau, unsigned threads = 0);

struct SumFrequencyResult {
    TemporalTrace trace;
    CompensationResult compensation;
};

/// Area-normalized I(tau) = |sum_j w_j sqrt(ws wi) Phi_j exp(-i Omega_j tau)|^2.
SumFrequencyResult sumfreq_trace(const SpectralSlice& slice, const std::vector<double>& tau,
                                 CompensationMode mode, unsigned threads = 0);

/// Uncompensated ensemble trace from the family's cross-correlator.
TemporalTrace sumfreq_trace_ensemble(const AnalyticFamily& fam, const ProcessConfig& cfg,
                                     const DispersionModel& model, const SpectralGrid& grid,
                                     const std::vector<double>& tau, unsigned threads = 0);

/// Mean over realizations of the per-realization area-normalized traces, each compensated
/// with mode; renormalized to unit area.
TemporalTrace sumfreq_trace_mc(const StructureSpec& spec, const ProcessConfig& cfg,
                               const DispersionModel& model, const SpectralGrid& grid,
                               const std::vector<double>& tau, CompensationMode mode,
                               std::size_t realizations, const RandomSource& src,
                               unsigned threads = 0);

/// Mean and standard error of unnormalized HOM numerators rho(tau) R_0 over realizations,
/// plus the mean R_0; for comparisons with the analytic ensemble trace.
struct HomMonteCarlo {
    std::vector<double> tau;
    std::vector<double> numerator_mean;
    std::vector<double> numerator_se;
    double r0_mean = 0.0;
    /// per-realization entanglement times (NaN where no dip)
    std::vector<double> dip_widths;
};

HomMonteCarlo hom_trace_mc(const StructureSpec& spec, const ProcessConfig& cfg,
                           const DispersionModel& model, const SpectralGrid& grid,
                           const std::vector<double>& tau, std::size_t realizations,
                           const RandomSource& src, unsigned threads = 0);

} // namespace spdc
