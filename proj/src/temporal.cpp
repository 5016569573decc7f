#include "spdc/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "spdc/constants.hpp"
#include "spdc/errors.hpp"
#include "spdc/parallel.hpp"

namespace spdc {

namespace {

// the phase recurrence is reset from an exact exponential this often
constexpr std::size_t resync = 256;
// realizations per deterministic reduction block
constexpr std::size_t block = 32;
// coarse scan of the quadratic coefficient, in units of the least-squares value
constexpr double scan_max = 3.0;
constexpr std::size_t scan_points = 61;

// out[k] = sum_j c_j exp(-i a (Omega0 + j dOmega) tau_k)
std::vector<cplx> fourier_sum(const std::vector<cplx>& c, double Omega0, double dOmega, double a,
                              const std::vector<double>& tau, unsigned threads)
{
    std::vector<cplx> out(tau.size());
    parallel_for(tau.size(), threads, [&](std::size_t k) {
        const double t = a * tau[k];
        const cplx step = std::polar(1.0, -dOmega * t);
        cplx acc = 0.0;
        cplx z;
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (j % resync == 0)
                z = std::polar(1.0, -(Omega0 + static_cast<double>(j) * dOmega) * t);
            acc += c[j] * z;
            z *= step;
        }
        out[k] = acc;
    });
    return out;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x)
{
    const std::size_t M = x.size();
    std::vector<double> w(M, 0.0);
    for (std::size_t j = 1; j < M; ++j) {
        const double h = 0.5 * (x[j] - x[j - 1]);
        w[j - 1] += h;
        w[j] += h;
    }
    return w;
}

struct Detuning {
    double Omega0;
    double dOmega;
};

Detuning detuning(const SpectralGrid& g)
{
    const std::size_t M = g.size();
    return {g.omega_s[0] - g.omega_s0(), (g.omega_s[M - 1] - g.omega_s[0]) / static_cast<double>(M - 1)};
}

void require_cw_grid(const SpectralGrid& g)
{
    if (g.size() < 2)
        throw ParameterError("temporal traces need a spectral grid of at least 2 points");
}

// HOM from complex weights W_j (already including quadrature weights) and R_0
TemporalTrace hom_from_weights(const SpectralGrid& grid, const std::vector<cplx>& W, double R0,
                               const std::vector<double>& tau, unsigned threads)
{
    if (!(R0 > 0.0) || !std::isfinite(R0))
        throw DomainError("hom_trace: R_0 = 0 (empty spectrum)");
    const auto d = detuning(grid);
    const auto S = fourier_sum(W, d.Omega0, d.dOmega, 2.0, tau, threads);
    TemporalTrace t;
    t.tau = tau;
    t.values.resize(tau.size());
    t.normalization = R0;
    for (std::size_t k = 0; k < tau.size(); ++k)
        t.values[k] = 1.0 - S[k].real() / R0;
    return t;
}

struct HomWeights {
    std::vector<cplx> W;
    double R0;
};

HomWeights hom_weights(const SpectralSlice& slice)
{
    const auto& g = slice.grid;
    require_cw_grid(g);
    const std::size_t M = g.size();
    const auto w = trapezoid_weights(g.omega_s);
    HomWeights h;
    h.W.resize(M);
    h.R0 = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const double ww = w[j] * g.omega_s[j] * g.omega_i(j);
        h.W[j] = ww * slice.values[j] * std::conj(slice.values[g.mirror(j)]);
        h.R0 += ww * std::norm(slice.values[j]);
    }
    return h;
}

std::vector<double> x_axis(const SpectralGrid& g)
{
    std::vector<double> x(g.size());
    const double w0 = g.omega_s0();
    for (std::size_t j = 0; j < g.size(); ++j)
        x[j] = (g.omega_s[j] - w0) / w0;
    return x;
}

// w_j sqrt(ws wi) Phi_j
std::vector<cplx> sumfreq_amplitude(const SpectralSlice& s)
{
    const auto& g = s.grid;
    const auto w = trapezoid_weights(g.omega_s);
    std::vector<cplx> a(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        a[j] = w[j] * std::sqrt(g.omega_s[j] * g.omega_i(j)) * s.values[j];
    return a;
}

std::vector<double> intensity(const SpectralSlice& s, const std::vector<double>& tau, unsigned threads)
{
    const auto d = detuning(s.grid);
    const auto S = fourier_sum(sumfreq_amplitude(s), d.Omega0, d.dOmega, 1.0, tau, threads);
    std::vector<double> I(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k)
        I[k] = std::norm(S[k]);
    return I;
}

TemporalTrace normalized_trace(const std::vector<double>& tau, std::vector<double> I)
{
    const double area = trapezoid(tau, I);
    if (!(area > 0.0) || !std::isfinite(area))
        throw DomainError("sum-frequency trace has zero area");
    for (double& v : I)
        v /= area;
    return {tau, std::move(I), area};
}

SpectralSlice apply_quadratic(const SpectralSlice& s, double c1, double c2)
{
    SpectralSlice out = s;
    const auto x = x_axis(s.grid);
    for (std::size_t j = 0; j < x.size(); ++j)
        out.values[j] *= std::polar(1.0, -(c1 * x[j] + c2 * x[j] * x[j]));
    return out;
}

} // namespace

std::vector<double> tau_grid(double half_span, std::size_t n)
{
    if (n < 2)
        throw ParameterError("tau grid needs at least 2 points");
    if (!(half_span > 0.0))
        throw ParameterError("tau grid half span must be positive");
    std::vector<double> t(n);
    const double den = static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = half_span * (2.0 * static_cast<double>(k) - den) / den;
    return t;
}

TemporalTrace hom_trace(const SpectralSlice& slice, const std::vector<double>& tau, unsigned threads)
{
    const auto h = hom_weights(slice);
    return hom_from_weights(slice.grid, h.W, h.R0, tau, threads);
}

TemporalTrace hom_trace_ensemble(const AnalyticFamily& fam, const ProcessConfig& cfg,
                                 const DispersionModel& model, const SpectralGrid& grid,
                                 const std::vector<double>& tau, unsigned threads)
{
    require_cw_grid(grid);
    const auto dk = mismatch_on_grid(model, grid);
    const auto g2 = coupling_squared(model, cfg, grid);
    const auto w = trapezoid_weights(grid.omega_s);
    const std::size_t M = grid.size();
    const double xi2 = cfg.pump_amplitude * cfg.pump_amplitude;
    std::vector<cplx> W(M);
    double R0 = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const double ww = w[j] * grid.omega_s[j] * grid.omega_i(j) * g2[j] * xi2;
        W[j] = ww * family_xcorr(fam, dk[j], dk[grid.mirror(j)]);
        R0 += ww * family_xcorr(fam, dk[j], dk[j]).real();
    }
    return hom_from_weights(grid, W, R0, tau, threads);
}

double entanglement_time(const TemporalTrace& hom)
{
    std::vector<double> dip(hom.values.size());
    for (std::size_t k = 0; k < dip.size(); ++k)
        dip[k] = 1.0 - hom.values[k];
    const double depth = *std::max_element(dip.begin(), dip.end());
    if (!(depth >= 0.1))
        throw DomainError("entanglement_time: no dip (depth below 0.1)");
    return fwhm(hom.tau, dip);
}

double dispersion_cancellation_check(const SpectralSlice& slice,
                                     const std::function<double(double)>& phase,
                                     const std::vector<double>& tau, unsigned threads)
{
    SpectralSlice p = slice;
    const auto& g = slice.grid;
    for (std::size_t j = 0; j < g.size(); ++j)
        p.values[j] *= std::polar(1.0, phase(g.omega_s[j]) + phase(g.omega_i(j)));
    const auto a = hom_trace(slice, tau, threads);
    const auto b = hom_trace(p, tau, threads);
    double m = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k)
        m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

PhaseProfile spectral_phase(const SpectralSlice& slice, double rel_threshold)
{
    const std::size_t M = slice.values.size();
    PhaseProfile p;
    p.omega_s = slice.grid.omega_s;
    p.weights.resize(M);
    p.phase.assign(M, std::numeric_limits<double>::quiet_NaN());
    double peak = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        p.weights[j] = std::norm(slice.values[j]);
        peak = std::max(peak, p.weights[j]);
    }
    if (!(peak > 0.0))
        throw DomainError("spectral_phase: amplitude vanishes everywhere");
    const double cut = rel_threshold * peak;
    std::size_t j = 0;
    while (j < M) {
        if (p.weights[j] < cut) {
            ++j;
            continue;
        }
        const std::size_t first = j;
        p.phase[j] = std::arg(slice.values[j]);
        ++j;
        while (j < M && p.weights[j] >= cut) {
            const double step = std::remainder(std::arg(slice.values[j]) - std::arg(slice.values[j - 1]),
                                               2.0 * constants::pi);
            p.phase[j] = p.phase[j - 1] + step;
            ++j;
        }
        p.segments.emplace_back(first, j - 1);
    }
    return p;
}

QuadraticPhaseFit fit_quadratic_phase(const PhaseProfile& p, double omega_s0)
{
    const std::size_t nseg = p.segments.size();
    std::size_t rows = 0;
    double wmax = 0.0;
    for (const auto& s : p.segments) {
        rows += s.second - s.first + 1;
        for (std::size_t j = s.first; j <= s.second; ++j)
            wmax = std::max(wmax, p.weights[j]);
    }
    const std::size_t cols = 2 + nseg;
    if (rows < cols || !(wmax > 0.0))
        throw DomainError("fit_quadratic_phase: degenerate fit (too few weighted samples)");
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    A.setZero();
    std::size_t r = 0;
    for (std::size_t s = 0; s < nseg; ++s) {
        for (std::size_t j = p.segments[s].first; j <= p.segments[s].second; ++j, ++r) {
            const double sw = std::sqrt(p.weights[j] / wmax);
            const double x = (p.omega_s[j] - omega_s0) / omega_s0;
            A(r, 0) = sw * x;
            A(r, 1) = sw * x * x;
            A(r, 2 + s) = sw;
            b(r) = sw * p.phase[j];
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < static_cast<Eigen::Index>(cols))
        throw DomainError("fit_quadratic_phase: degenerate fit (rank deficient)");
    const Eigen::VectorXd c = qr.solve(b);
    QuadraticPhaseFit f;
    f.c1 = c(0);
    f.c2 = c(1);
    for (std::size_t s = 0; s < nseg; ++s)
        f.offsets.push_back(c(2 + s));
    double sw2 = 0.0, sr2 = 0.0;
    r = 0;
    for (std::size_t s = 0; s < nseg; ++s) {
        for (std::size_t j = p.segments[s].first; j <= p.segments[s].second; ++j, ++r) {
            const double x = (p.omega_s[j] - omega_s0) / omega_s0;
            const double res = p.phase[j] - (f.c1 * x + f.c2 * x * x + f.offsets[s]);
            const double w = p.weights[j] / wmax;
            sw2 += w;
            sr2 += w * res * res;
        }
    }
    f.residual_rms = std::sqrt(sr2 / sw2);
    return f;
}

std::string compensation_name(CompensationMode m)
{
    switch (m) {
    case CompensationMode::none: return "none";
    case CompensationMode::quadratic: return "quadratic";
    case CompensationMode::quadratic_ls: return "quadratic-ls";
    case CompensationMode::ideal: return "ideal";
    }
    return "unknown";
}

CompensationMode compensation_from_name(const std::string& name)
{
    for (auto m : {CompensationMode::none, CompensationMode::quadratic, CompensationMode::quadratic_ls,
                   CompensationMode::ideal})
        if (compensation_name(m) == name)
            return m;
    throw ParameterError("unknown compensation mode '" + name + "' (none | quadratic | quadratic-ls | ideal)");
}

CompensationResult compensate(const SpectralSlice& slice, CompensationMode mode,
                              const std::vector<double>& tau, unsigned threads)
{
    CompensationResult r;
    r.mode = mode;
    if (mode == CompensationMode::none) {
        r.slice = slice;
        return r;
    }
    if (mode == CompensationMode::ideal) {
        r.slice = slice;
        for (auto& v : r.slice.values)
            v = std::abs(v);
        return r;
    }
    const auto fit = fit_quadratic_phase(spectral_phase(slice), slice.grid.omega_s0());
    r.c1 = fit.c1;
    r.c2 = fit.c2;
    r.c2_least_squares = fit.c2;
    if (mode == CompensationMode::quadratic && fit.c2 != 0.0) {
        auto peak = [&](double c2) {
            const auto I = intensity(apply_quadratic(slice, fit.c1, c2), tau, threads);
            return *std::max_element(I.begin(), I.end());
        };
        const double ds = scan_max / static_cast<double>(scan_points - 1);
        double best_s = 0.0, best = -1.0;
        for (std::size_t i = 0; i < scan_points; ++i) {
            const double s = ds * static_cast<double>(i);
            const double v = peak(s * fit.c2);
            if (v > best) {
                best = v;
                best_s = s;
            }
        }
        // golden-section refinement inside the neighbouring scan cells
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = std::max(0.0, best_s - ds), b = best_s + ds;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = peak(x1 * fit.c2), f2 = peak(x2 * fit.c2);
        while (b - a > 1e-4 * std::max(1.0, best_s)) {
            if (f1 > f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = peak(x1 * fit.c2);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = peak(x2 * fit.c2);
            }
        }
        const double s = f1 > f2 ? x1 : x2;
        r.c2 = (std::max(f1, f2) >= best ? s : best_s) * fit.c2;
    }
    r.slice = apply_quadratic(slice, r.c1, r.c2);
    return r;
}

SumFrequencyResult sumfreq_trace(const SpectralSlice& slice, const std::vector<double>& tau,
                                 CompensationMode mode, unsigned threads)
{
    SumFrequencyResult out;
    out.compensation = compensate(slice, mode, tau, threads);
    out.trace = normalized_trace(tau, intensity(out.compensation.slice, tau, threads));
    return out;
}

TemporalTrace sumfreq_trace_ensemble(const AnalyticFamily& fam, const ProcessConfig& cfg,
                                     const DispersionModel& model, const SpectralGrid& grid,
                                     const std::vector<double>& tau, unsigned threads)
{
    require_cw_grid(grid);
    const std::size_t M = grid.size();
    const auto dk = mismatch_on_grid(model, grid);
    const auto g2 = coupling_squared(model, cfg, grid);
    const auto w = trapezoid_weights(grid.omega_s);
    std::vector<double> a(M);
    for (std::size_t j = 0; j < M; ++j)
        a[j] = w[j] * std::sqrt(grid.omega_s[j] * grid.omega_i(j) * g2[j]) * cfg.pump_amplitude;
    // chirped: the cross-correlator factorizes, so evaluate F once per sample
    std::vector<cplx> Fc;
    if (fam.family == Family::chirped) {
        Fc.resize(M);
        for (std::size_t j = 0; j < M; ++j)
            Fc[j] = f_chirp(PhaseMismatchPoint::from_total(dk[j], fam.dk0()), fam.N_L, fam.l0,
                            fam.zeta_prime());
    }
    // Toeplitz collapse: c_m = sum_k a_{k+m} a_k <F(q_{k+m}) F*(q_k)>
    std::vector<cplx> c(M);
    parallel_for(M, threads, [&](std::size_t m) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k + m < M; ++k) {
            const cplx x = Fc.empty() ? family_xcorr(fam, dk[k + m], dk[k]) : Fc[k + m] * std::conj(Fc[k]);
            acc += a[k + m] * a[k] * x;
        }
        c[m] = m == 0 ? acc : 2.0 * acc;
    });
    const auto d = detuning(grid);
    const auto S = fourier_sum(c, 0.0, d.dOmega, 1.0, tau, threads);
    std::vector<double> I(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k)
        I[k] = std::max(0.0, S[k].real());
    return normalized_trace(tau, std::move(I));
}

TemporalTrace sumfreq_trace_mc(const StructureSpec& spec, const ProcessConfig& cfg,
                               const DispersionModel& model, const SpectralGrid& grid,
                               const std::vector<double>& tau, CompensationMode mode,
                               std::size_t realizations, const RandomSource& src, unsigned threads)
{
    if (realizations < 1)
        throw ParameterError("sumfreq_trace_mc: need at least one realization");
    std::vector<double> acc(tau.size(), 0.0);
    std::vector<std::vector<double>> slot(block);
    for (std::size_t b0 = 0; b0 < realizations; b0 += block) {
        const std::size_t nb = std::min(block, realizations - b0);
        parallel_for(nb, threads, [&](std::size_t i) {
            Rng rng(substream(src, b0 + i));
            const auto st = generate_structure(spec, rng);
            const auto sl = two_photon_amplitude(st, cfg, model, grid);
            slot[i] = sumfreq_trace(sl, tau, mode, 1).trace.values;
        });
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t k = 0; k < tau.size(); ++k)
                acc[k] += slot[i][k];
    }
    for (double& v : acc)
        v /= static_cast<double>(realizations);
    return normalized_trace(tau, std::move(acc));
}

HomMonteCarlo hom_trace_mc(const StructureSpec& spec, const ProcessConfig& cfg,
                           const DispersionModel& model, const SpectralGrid& grid,
                           const std::vector<double>& tau, std::size_t realizations,
                           const RandomSource& src, unsigned threads)
{
    if (realizations < 2)
        throw ParameterError("hom_trace_mc: need at least 2 realizations");
    const std::size_t T = tau.size();
    std::vector<double> s1(T, 0.0), s2(T, 0.0);
    HomMonteCarlo out;
    out.tau = tau;
    out.dip_widths.assign(realizations, std::numeric_limits<double>::quiet_NaN());
    struct Slot {
        std::vector<double> num;
        double r0;
    };
    std::vector<Slot> slot(block);
    double r0 = 0.0;
    for (std::size_t b0 = 0; b0 < realizations; b0 += block) {
        const std::size_t nb = std::min(block, realizations - b0);
        parallel_for(nb, threads, [&](std::size_t i) {
            Rng rng(substream(src, b0 + i));
            const auto st = generate_structure(spec, rng);
            const auto sl = two_photon_amplitude(st, cfg, model, grid);
            const auto tr = hom_trace(sl, tau, 1);
            slot[i].num.resize(T);
            for (std::size_t k = 0; k < T; ++k)
                slot[i].num[k] = (1.0 - tr.values[k]) * tr.normalization;
            slot[i].r0 = tr.normalization;
            try {
                out.dip_widths[b0 + i] = entanglement_time(tr);
            } catch (const DomainError&) {
            }
        });
        for (std::size_t i = 0; i < nb; ++i) {
            r0 += slot[i].r0;
            for (std::size_t k = 0; k < T; ++k) {
                s1[k] += slot[i].num[k];
                s2[k] += slot[i].num[k] * slot[i].num[k];
            }
        }
    }
    const double R = static_cast<double>(realizations);
    out.r0_mean = r0 / R;
    out.numerator_mean.resize(T);
    out.numerator_se.resize(T);
    for (std::size_t k = 0; k < T; ++k) {
        const double m = s1[k] / R;
        out.numerator_mean[k] = m;
        out.numerator_se[k] = std::sqrt(std::max(0.0, (s2[k] - R * m * m) / (R - 1.0)) / R);
    }
    return out;
}

} // namespace spdc
