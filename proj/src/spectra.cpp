#include "spdc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "spdc/constants.hpp"
#include "spdc/errors.hpp"
#include "spdc/parallel.hpp"

namespace spdc {

namespace {

// realizations per reduction block in the Monte Carlo density
constexpr std::size_t mc_block = 64;

std::size_t half_count(const SpectralGrid& g)
{
    return (g.size() + 1) / 2;
}

} // namespace

double ProcessConfig::omega_p() const
{
    return omega_from_wavelength(pump_wavelength);
}

void ProcessConfig::validate() const
{
    if (!(pump_wavelength > 0.0))
        throw ParameterError("pump-wavelength must be positive");
    if (!(pump_amplitude >= 0.0))
        throw ParameterError("pump-amplitude must be non-negative");
    if (!(chi2 > 0.0))
        throw ParameterError("chi2-effective must be positive");
    if (!(beam_area > 0.0))
        throw ParameterError("beam-area must be positive");
    if (!(pump_dx > 0.0) || !(pump_dy > 0.0))
        throw ParameterError("pump transverse widths must be positive");
    if (!(eta_sum > 0.0))
        throw ParameterError("eta-sum must be positive");
}

SpectralGrid SpectralGrid::centered(double omega_s0, double rel_span, std::size_t M)
{
    if (M < 2)
        throw ParameterError("spectral grid needs at least 2 points");
    if (!(rel_span > 0.0) || !(rel_span < 1.0))
        throw ParameterError("spectral grid span must lie in (0, 1) relative to omega_s0");
    SpectralGrid g;
    g.omega_p = 2.0 * omega_s0;
    g.omega_s.resize(M);
    const double den = static_cast<double>(M - 1);
    for (std::size_t j = 0; j < M; ++j) {
        // integer numerator keeps t_{M-1-j} = -t_j exactly
        const double t = (2.0 * static_cast<double>(j) - den) / den;
        g.omega_s[j] = omega_s0 + omega_s0 * rel_span * t;
    }
    return g;
}

void SpectralGrid::validate() const
{
    if (omega_s.size() < 2)
        throw ParameterError("spectral grid needs at least 2 points");
    if (!(omega_s.front() > 0.0))
        throw DomainError("spectral grid: idler frequency omega_p - omega_s must be positive");
}

std::vector<double> mismatch_on_grid(const DispersionModel& model, const SpectralGrid& grid)
{
    grid.validate();
    const std::size_t M = grid.size();
    std::vector<double> dk(M);
    for (std::size_t j = 0; j < half_count(grid); ++j)
        dk[j] = collinear_mismatch(model, grid.omega_s[j], grid.omega_i(j));
    for (std::size_t j = half_count(grid); j < M; ++j)
        dk[j] = dk[M - 1 - j];
    return dk;
}

std::vector<double> coupling_squared(const DispersionModel& model, const ProcessConfig& cfg,
                                     const SpectralGrid& grid)
{
    const std::size_t M = grid.size();
    std::vector<double> n(M);
    for (std::size_t j = 0; j < M; ++j)
        n[j] = model.refractive_index(grid.omega_s[j]);
    const double pre = cfg.chi2 * cfg.chi2 /
                       (4.0 * constants::c * constants::c * constants::pi * constants::pi);
    std::vector<double> g2(M);
    for (std::size_t j = 0; j < M; ++j) {
        const std::size_t m = M - 1 - j;
        g2[j] = pre * (grid.omega_s[j] * grid.omega_s[m]) / (n[j] * n[m]);
    }
    return g2;
}

namespace {

SpectralSlice slice_from_f(const SpectralGrid& grid, std::vector<double> dk,
                           const std::vector<cplx>& F, const DispersionModel& model,
                           const ProcessConfig& cfg)
{
    const auto g2 = coupling_squared(model, cfg, grid);
    SpectralSlice s;
    s.grid = grid;
    s.values.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        s.values[j] = cplx(0.0, std::sqrt(g2[j])) * cfg.pump_amplitude * F[j];
    s.delta_k = std::move(dk);
    return s;
}

std::vector<cplx> f_on_grid(const PolingStructure& st, const std::vector<double>& dk)
{
    const std::size_t M = dk.size();
    const std::size_t H = (M + 1) / 2;
    std::vector<cplx> F(M);
    f_exact_many(st, std::span<const double>(dk.data(), H), std::span<cplx>(F.data(), H));
    for (std::size_t j = H; j < M; ++j)
        F[j] = F[M - 1 - j];
    return F;
}

} // namespace

SpectralSlice two_photon_amplitude(const PolingStructure& s, const ProcessConfig& cfg,
                                   const DispersionModel& model, const SpectralGrid& grid)
{
    if (cfg.pump_type != PumpType::cw)
        throw ParameterError("two_photon_amplitude: only the cw pump is supported");
    auto dk = mismatch_on_grid(model, grid);
    const auto F = f_on_grid(s, dk);
    return slice_from_f(grid, std::move(dk), F, model, cfg);
}

SpectralSlice two_photon_amplitude(const AnalyticFamily& fam, const ProcessConfig& cfg,
                                   const DispersionModel& model, const SpectralGrid& grid)
{
    if (cfg.pump_type != PumpType::cw)
        throw ParameterError("two_photon_amplitude: only the cw pump is supported");
    auto dk = mismatch_on_grid(model, grid);
    const std::size_t M = grid.size();
    std::vector<cplx> F(M);
    if (fam.family == Family::ideal) {
        const auto st = gen_ideal(fam.N_L, fam.l0);
        F = f_on_grid(st, dk);
    } else if (fam.family == Family::chirped) {
        const double dk0 = fam.dk0();
        for (std::size_t j = 0; j < (M + 1) / 2; ++j)
            F[j] = f_chirp(PhaseMismatchPoint::from_total(dk[j], dk0), fam.N_L, fam.l0,
                           fam.zeta_prime());
        for (std::size_t j = (M + 1) / 2; j < M; ++j)
            F[j] = F[M - 1 - j];
    } else {
        throw ParameterError("two_photon_amplitude: family '" + family_name(fam.family) +
                             "' is an ensemble; use joint_density or an explicit realization");
    }
    return slice_from_f(grid, std::move(dk), F, model, cfg);
}

DensitySlice joint_density(const SpectralSlice& slice)
{
    DensitySlice d;
    d.grid = slice.grid;
    d.values.resize(slice.values.size());
    for (std::size_t j = 0; j < d.values.size(); ++j)
        d.values[j] = std::norm(slice.values[j]);
    return d;
}

DensitySlice joint_density(const AnalyticFamily& fam, const ProcessConfig& cfg,
                           const DispersionModel& model, const SpectralGrid& grid)
{
    const auto dk = mismatch_on_grid(model, grid);
    const auto g2 = coupling_squared(model, cfg, grid);
    const std::size_t M = grid.size();
    DensitySlice d;
    d.grid = grid;
    d.values.resize(M);
    const double xi2 = cfg.pump_amplitude * cfg.pump_amplitude;
    for (std::size_t j = 0; j < (M + 1) / 2; ++j)
        d.values[j] = g2[j] * xi2 * family_mean_f2(fam, dk[j]);
    for (std::size_t j = (M + 1) / 2; j < M; ++j)
        d.values[j] = d.values[M - 1 - j];
    return d;
}

MonteCarloDensity joint_density_mc(const StructureSpec& spec, const ProcessConfig& cfg,
                                   const DispersionModel& model, const SpectralGrid& grid,
                                   std::size_t realizations, const RandomSource& src,
                                   unsigned threads)
{
    if (realizations < 2)
        throw ParameterError("Monte Carlo density needs at least 2 realizations");
    const auto dk = mismatch_on_grid(model, grid);
    const auto g2 = coupling_squared(model, cfg, grid);
    const std::size_t M = grid.size();
    const double xi2 = cfg.pump_amplitude * cfg.pump_amplitude;
    std::vector<double> s1(M, 0.0), s2(M, 0.0);
    std::vector<std::vector<double>> slot(mc_block);
    for (std::size_t b0 = 0; b0 < realizations; b0 += mc_block) {
        const std::size_t nb = std::min(mc_block, realizations - b0);
        parallel_for(nb, threads, [&](std::size_t i) {
            Rng rng(substream(src, b0 + i));
            const auto st = generate_structure(spec, rng);
            const auto F = f_on_grid(st, dk);
            auto& v = slot[i];
            v.resize(M);
            for (std::size_t j = 0; j < M; ++j)
                v[j] = g2[j] * xi2 * std::norm(F[j]);
        });
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = 0; j < M; ++j) {
                s1[j] += slot[i][j];
                s2[j] += slot[i][j] * slot[i][j];
            }
    }
    MonteCarloDensity out;
    out.realizations = realizations;
    out.mean.grid = grid;
    out.mean.values.resize(M);
    out.standard_error.resize(M);
    const double R = static_cast<double>(realizations);
    for (std::size_t j = 0; j < M; ++j) {
        const double m = s1[j] / R;
        const double var = std::max(0.0, (s2[j] - R * m * m) / (R - 1.0));
        out.mean.values[j] = m;
        out.standard_error[j] = std::sqrt(var / R);
    }
    return out;
}

Spectrum signal_spectrum(const DensitySlice& d, SpectrumNormalization norm)
{
    Spectrum s;
    s.omega_s = d.grid.omega_s;
    s.values.resize(d.values.size());
    double scale = 1.0;
    if (norm == SpectrumNormalization::unit_photon) {
        const double N = pair_rate(d);
        if (!(N > 0.0))
            throw DomainError("signal_spectrum: empty spectrum cannot be normalized");
        scale = 1.0 / N;
    }
    for (std::size_t j = 0; j < s.values.size(); ++j)
        s.values[j] = constants::hbar * s.omega_s[j] * d.values[j] * scale;
    return s;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size())
        throw ParameterError("trapezoid: size mismatch");
    double acc = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j)
        acc += 0.5 * (x[j] - x[j - 1]) * (y[j] + y[j - 1]);
    return acc;
}

double pair_rate(const DensitySlice& d)
{
    return trapezoid(d.grid.omega_s, d.values);
}

double fwhm(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 3)
        throw ParameterError("fwhm: need at least 3 matching samples");
    const double m = *std::max_element(y.begin(), y.end());
    if (!(m > 0.0) || !std::isfinite(m))
        throw DomainError("fwhm: curve maximum must be positive and finite");
    const double h = 0.5 * m;
    std::size_t a = 0;
    while (y[a] < h)
        ++a;
    std::size_t b = y.size() - 1;
    while (y[b] < h)
        --b;
    if (a == 0 || b + 1 == y.size())
        throw DomainError("fwhm: span too narrow; the half-maximum crossing lies outside the grid");
    const double xl = x[a - 1] + (h - y[a - 1]) * (x[a] - x[a - 1]) / (y[a] - y[a - 1]);
    const double xr = x[b] + (h - y[b]) * (x[b + 1] - x[b]) / (y[b + 1] - y[b]);
    return xr - xl;
}

Observable rate_observable()
{
    return {"rate", [](const RealizationView& v) { return pair_rate(v.density); }};
}

Observable width_observable()
{
    return {"width", [](const RealizationView& v) {
                const auto s = signal_spectrum(v.density);
                return fwhm(s.omega_s, s.values);
            }};
}

EnsembleStats summarize(const std::string& name, const std::vector<double>& samples,
                        std::size_t bins, std::uint64_t seed)
{
    EnsembleStats st;
    st.name = name;
    st.seed = seed;
    st.samples = samples;
    std::vector<double> v;
    v.reserve(samples.size());
    for (double x : samples) {
        if (std::isfinite(x))
            v.push_back(x);
        else
            ++st.failures;
    }
    st.realizations = v.size();
    if (v.size() < 2)
        throw DomainError("summarize: fewer than 2 valid realizations for '" + name + "'");
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    st.mean = mean;
    st.variance = m2 / (n - 1.0);
    m2 /= n;
    m3 /= n;
    m4 /= n;
    st.relative_fluctuation = mean > 0.0 ? std::sqrt(st.variance) / mean : 0.0;
    st.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    st.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    if (bins < 1)
        bins = 1;
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double w = (hi - lo) / static_cast<double>(bins);
    st.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        st.bin_edges[i] = lo + w * static_cast<double>(i);
    st.counts.assign(bins, 0);
    for (double x : v) {
        auto k = static_cast<std::size_t>((x - lo) / w);
        if (k >= bins)
            k = bins - 1;
        ++st.counts[k];
    }
    return st;
}

std::vector<EnsembleStats> ensemble_run(const StructureSpec& spec, const ProcessConfig& cfg,
                                        const DispersionModel& model, const SpectralGrid& grid,
                                        const std::vector<Observable>& observables,
                                        const RandomSource& src, const EnsembleOptions& opt)
{
    const StructureGenerator gen = [&spec](Rng& rng) { return generate_structure(spec, rng); };
    return ensemble_run(gen, cfg, model, grid, observables, src, opt);
}

std::vector<EnsembleStats> ensemble_run(const StructureGenerator& gen, const ProcessConfig& cfg,
                                        const DispersionModel& model, const SpectralGrid& grid,
                                        const std::vector<Observable>& observables,
                                        const RandomSource& src, const EnsembleOptions& opt)
{
    if (opt.realizations < 2)
        throw ParameterError("ensemble_run: realizations must be at least 2");
    if (observables.empty())
        throw ParameterError("ensemble_run: no observables requested");
    const std::size_t R = opt.realizations;
    const std::size_t K = observables.size();
    const auto dk = mismatch_on_grid(model, grid);
    const auto g2 = coupling_squared(model, cfg, grid);
    std::vector<double> values(R * K, std::numeric_limits<double>::quiet_NaN());
    parallel_for(R, opt.threads, [&](std::size_t r) {
        Rng rng(substream(src, r));
        const auto st = gen(rng);
        const auto F = f_on_grid(st, dk);
        SpectralSlice slice;
        slice.grid = grid;
        slice.delta_k = dk;
        slice.values.resize(grid.size());
        DensitySlice dens;
        dens.grid = grid;
        dens.values.resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            slice.values[j] = cplx(0.0, std::sqrt(g2[j])) * cfg.pump_amplitude * F[j];
            dens.values[j] = std::norm(slice.values[j]);
        }
        const RealizationView view{st, slice, dens};
        for (std::size_t k = 0; k < K; ++k) {
            try {
                values[r * K + k] = observables[k].extract(view);
            } catch (const DomainError&) {
                // recorded as a failure (NaN)
            }
        }
    });
    std::vector<EnsembleStats> out;
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> col(R);
        for (std::size_t r = 0; r < R; ++r)
            col[r] = values[r * K + k];
        auto st = summarize(observables[k].name, col, opt.histogram_bins, src.seed);
        if (static_cast<double>(st.failures) > opt.max_failure_fraction * static_cast<double>(R)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "ensemble_run: observable '%s' failed on %zu of %zu realizations",
                          observables[k].name.c_str(), st.failures, R);
            throw DomainError(buf);
        }
        out.push_back(std::move(st));
    }
    return out;
}

std::string match_target_name(MatchTarget t)
{
    return t == MatchTarget::equal_width ? "equal-width" : "equal-rate";
}

MatchTarget match_target_from_name(const std::string& name)
{
    if (name == "equal-width")
        return MatchTarget::equal_width;
    if (name == "equal-rate")
        return MatchTarget::equal_rate;
    throw ParameterError("unknown match target '" + name + "' (equal-width | equal-rate)");
}

WidthRate analytic_width_rate(const AnalyticFamily& fam, const ProcessConfig& cfg,
                              const DispersionModel& model, const SpectralGrid& grid)
{
    const auto d = joint_density(fam, cfg, model, grid);
    const auto s = signal_spectrum(d);
    return {fwhm(s.omega_s, s.values), pair_rate(d)};
}

std::vector<MatchRow> match_parameter(MatchTarget target, const std::vector<double>& zetas,
                                      const MatchSolverConfig& solver, const ProcessConfig& cfg,
                                      const DispersionModel& model, const SpectralGrid& grid)
{
    if (!(solver.sigma_min > 0.0) || !(solver.sigma_max > solver.sigma_min))
        throw ParameterError("match_parameter: need 0 < sigma_min < sigma_max");
    if (!(solver.rel_tol > 0.0))
        throw ParameterError("match_parameter: rel_tol must be positive");
    AnalyticFamily rps{Family::rps, solver.N_L, solver.l0, 0.0, 0.0};
    // objective increasing in sigma; a span overflow means "wider than any chirp on the grid"
    auto objective = [&](double sigma, double target_value) {
        rps.sigma = sigma;
        if (target == MatchTarget::equal_width) {
            try {
                return analytic_width_rate(rps, cfg, model, grid).width - target_value;
            } catch (const DomainError&) {
                return std::numeric_limits<double>::infinity();
            }
        }
        const auto d = joint_density(rps, cfg, model, grid);
        return target_value - pair_rate(d);
    };
    std::vector<MatchRow> rows;
    for (double zeta : zetas) {
        MatchRow row;
        row.zeta = zeta;
        AnalyticFamily ch{Family::chirped, solver.N_L, solver.l0, 0.0, zeta};
        const auto cw = analytic_width_rate(ch, cfg, model, grid);
        row.chirp_width = cw.width;
        row.chirp_rate = cw.rate;
        const double tv = target == MatchTarget::equal_width ? cw.width : cw.rate;
        double lo = solver.sigma_min, hi = solver.sigma_max;
        const double flo = objective(lo, tv), fhi = objective(hi, tv);
        if (flo > 0.0 || fhi < 0.0) {
            rows.push_back(row);
            continue;
        }
        while (hi - lo > solver.rel_tol * 0.5 * (hi + lo)) {
            const double mid = 0.5 * (lo + hi);
            if (objective(mid, tv) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        row.sigma = 0.5 * (lo + hi);
        rps.sigma = row.sigma;
        try {
            const auto rw = analytic_width_rate(rps, cfg, model, grid);
            row.rps_width = rw.width;
            row.rps_rate = rw.rate;
            row.matched = true;
            row.rate_ratio = rw.rate / cw.rate;
            row.width_ratio = rw.width / cw.width;
        } catch (const DomainError&) {
            row.matched = false;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace spdc
