#include "doctest.h"

#include <cmath>
#include <vector>

#include "spdc/constants.hpp"
#include "spdc/errors.hpp"
#include "spdc/temporal.hpp"

using namespace spdc;

namespace {

struct Setup {
    DispersionModel model{297.0};
    ProcessConfig cfg;
    double l0;
    Setup() { l0 = qpm_period(model, cfg.omega_s0(), cfg.omega_s0()); }
    SpectralGrid grid(std::size_t M, double span = 0.5) const
    {
        return SpectralGrid::centered(cfg.omega_s0(), span, M);
    }
    AnalyticFamily rps(double sigma) const { return {Family::rps, 700, l0, sigma, 0.0}; }
    AnalyticFamily chirp(double zeta) const { return {Family::chirped, 700, l0, 0.0, zeta}; }
    StructureSpec rps_spec(double sigma) const
    {
        StructureSpec s;
        s.kind = StructureKind::rps;
        s.N_L = 700;
        s.l0 = l0;
        s.sigma = sigma;
        return s;
    }
};

double spectral_width_hz(const DensitySlice& d)
{
    const auto s = signal_spectrum(d);
    return fwhm(s.omega_s, s.values) / (2.0 * constants::pi);
}

} // namespace

TEST_CASE("tau grid")
{
    const auto t = tau_grid();
    CHECK(t.size() == 4097);
    CHECK(t[2048] == 0.0);
    CHECK(t.front() == doctest::Approx(-500e-15));
    CHECK(t.back() == -t.front());
    CHECK_THROWS_AS(tau_grid(1e-15, 1), ParameterError);
}

TEST_CASE("HOM trace of one realization")
{
    Setup S;
    const auto g = S.grid(2048);
    const auto tau = tau_grid(500e-15, 2001);
    Rng rng({3, 0});
    const auto sl = two_photon_amplitude(gen_rps(700, S.l0, 2.1e-6, rng), S.cfg, S.model, g);
    const auto h = hom_trace(sl, tau);
    CHECK(std::abs(h.values[1000]) <= 1e-6);
    CHECK(h.values.front() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(h.values.back() == doctest::Approx(1.0).epsilon(0.02));
    for (std::size_t k = 0; k < tau.size(); ++k)
        CHECK(std::abs(h.values[k] - h.values[tau.size() - 1 - k]) <= 1e-8);
    const double t = entanglement_time(h);
    CHECK(t > 1e-15);
    CHECK(t < 10e-15);
    const double tbp = t * spectral_width_hz(joint_density(sl));
    CHECK(tbp >= 0.3);
    CHECK(tbp <= 1.5);
}

TEST_CASE("HOM trace of an empty spectrum and no-dip detection")
{
    Setup S;
    const auto g = S.grid(64);
    SpectralSlice empty;
    empty.grid = g;
    empty.values.assign(g.size(), 0.0);
    CHECK_THROWS_AS(hom_trace(empty, tau_grid(1e-13, 11)), DomainError);
    TemporalTrace flat{tau_grid(1e-13, 11), std::vector<double>(11, 1.0), 1.0};
    CHECK_THROWS_WITH_AS(entanglement_time(flat), doctest::Contains("no dip"), DomainError);
}

TEST_CASE("ensemble HOM traces")
{
    Setup S;
    const auto g = S.grid(2048);
    const auto tau = tau_grid(500e-15, 2001);
    const auto hr = hom_trace_ensemble(S.rps(2.244e-6), S.cfg, S.model, g, tau);
    const auto hc = hom_trace(two_photon_amplitude(S.chirp(2.5e6), S.cfg, S.model, g), tau);
    CHECK(std::abs(hr.values[1000]) <= 1e-6);
    CHECK(std::abs(hc.values[1000]) <= 1e-6);
    CHECK(hr.values.front() == doctest::Approx(1.0).epsilon(0.02));
    const double tr = entanglement_time(hr), tc = entanglement_time(hc);
    CHECK(tr == doctest::Approx(tc).epsilon(0.10));
    // Dtau ~ 1 / DS_s over sigma
    std::vector<double> prod;
    for (double sigma : {0.0, 0.1e-6, 0.5e-6, 1e-6, 2e-6}) {
        const auto h = hom_trace_ensemble(S.rps(sigma), S.cfg, S.model, g, tau);
        prod.push_back(entanglement_time(h) *
                       spectral_width_hz(joint_density(S.rps(sigma), S.cfg, S.model, g)));
    }
    const auto [lo, hi] = std::minmax_element(prod.begin(), prod.end());
    CHECK(*hi / *lo <= 1.25);
}

TEST_CASE("analytic ensemble HOM against Monte Carlo")
{
    Setup S;
    const auto g = S.grid(512);
    const auto tau = tau_grid(40e-15, 81);
    const auto an = hom_trace_ensemble(S.rps(2e-6), S.cfg, S.model, g, tau);
    const auto mc = hom_trace_mc(S.rps_spec(2e-6), S.cfg, S.model, g, tau, 1000, {21, 0});
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const double a = (1.0 - an.values[k]) * an.normalization;
        INFO("tau = " << tau[k]);
        CHECK(std::abs(mc.numerator_mean[k] - a) < 4.0 * mc.numerator_se[k]);
    }
}

TEST_CASE("dispersion cancellation")
{
    Setup S;
    const auto g = S.grid(1024);
    const auto tau = tau_grid(200e-15, 401);
    Rng rng({4, 0});
    const auto sl = two_photon_amplitude(gen_rps(700, S.l0, 2e-6, rng), S.cfg, S.model, g);
    const double w0 = S.cfg.omega_s0();
    CHECK(dispersion_cancellation_check(sl, [](double) { return 0.0; }, tau) == 0.0);
    CHECK(dispersion_cancellation_check(sl, [&](double w) {
              const double x = (w - w0) / (0.5 * w0);
              return 1e3 * x * x;
          }, tau) < 1e-8);
    std::vector<double> a(6), p(6);
    for (int i = 0; i < 6; ++i) {
        a[i] = 20.0 * (rng.uniform() - 0.5);
        p[i] = 6.283 * rng.uniform();
    }
    CHECK(dispersion_cancellation_check(sl, [&](double w) {
              const double x = (w - w0) / w0;
              double v = 0;
              for (int i = 0; i < 6; ++i)
                  v += a[i] * std::sin((i + 1) * 5.0 * x + p[i]);
              return v;
          }, tau) < 1e-8);
}

TEST_CASE("spectral phase and quadratic fits")
{
    Setup S;
    const auto g = S.grid(1024);
    const double w0 = S.cfg.omega_s0();
    SpectralSlice real;
    real.grid = g;
    for (double w : g.omega_s) {
        const double x = (w - w0) / w0;
        real.values.push_back(std::exp(-x * x / 0.02));
    }
    const auto p0 = spectral_phase(real);
    REQUIRE(p0.segments.size() == 1);
    for (std::size_t j = p0.segments[0].first; j <= p0.segments[0].second; ++j)
        CHECK(p0.phase[j] == 0.0);

    // injected quadratic and linear phase removed exactly
    SpectralSlice inj = real;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = (g.omega_s[j] - w0) / w0;
        inj.values[j] *= std::polar(1.0, 0.7 + 30.0 * x + 400.0 * x * x);
    }
    const auto f = fit_quadratic_phase(spectral_phase(inj), w0);
    CHECK(f.c2 == doctest::Approx(400.0).epsilon(1e-9));
    CHECK(f.c1 == doctest::Approx(30.0).epsilon(1e-9));
    CHECK(f.residual_rms < 1e-6);
    const auto tau = tau_grid(100e-15, 201);
    const auto c = compensate(inj, CompensationMode::quadratic_ls, tau);
    const auto fc = fit_quadratic_phase(spectral_phase(c.slice), w0);
    CHECK(std::abs(fc.c2) < 1e-6);
    CHECK(fc.residual_rms < 1e-6);
    const auto id = compensate(real, CompensationMode::ideal, tau);
    CHECK(id.slice.values == real.values);

    // injection on the chirped amplitude shifts the fitted coefficient by the injected amount
    const auto ch = two_photon_amplitude(S.chirp(2.5e6), S.cfg, S.model, g);
    SpectralSlice ch2 = ch;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = (g.omega_s[j] - w0) / w0;
        ch2.values[j] *= std::polar(1.0, 150.0 * x * x);
    }
    const double d = fit_quadratic_phase(spectral_phase(ch2), w0).c2 -
                     fit_quadratic_phase(spectral_phase(ch), w0).c2;
    CHECK(d == doctest::Approx(150.0).epsilon(0.01));

    // a zero gap splits the profile into two segments
    SpectralSlice gap = inj;
    for (std::size_t j = 500; j < 520; ++j)
        gap.values[j] = 0.0;
    const auto pg = spectral_phase(gap);
    CHECK(pg.segments.size() == 2);
    CHECK(std::isnan(pg.phase[510]));
    CHECK(fit_quadratic_phase(pg, w0).c2 == doctest::Approx(400.0).epsilon(1e-9));

    SpectralSlice spike = real;
    for (auto& v : spike.values)
        v = 0.0;
    spike.values[300] = 1.0;
    CHECK_THROWS_AS(fit_quadratic_phase(spectral_phase(spike), w0), DomainError);
    CHECK(compensation_from_name("quadratic-ls") == CompensationMode::quadratic_ls);
    CHECK_THROWS_AS(compensation_from_name("cubic"), ParameterError);
}

TEST_CASE("sum-frequency traces")
{
    Setup S;
    const auto g = S.grid(2048);
    const auto tau = tau_grid(250e-15, 2049);
    const auto ch = two_photon_amplitude(S.chirp(2.5e6), S.cfg, S.model, g);
    const auto none = sumfreq_trace(ch, tau, CompensationMode::none);
    const auto quad = sumfreq_trace(ch, tau, CompensationMode::quadratic);
    const auto ls = sumfreq_trace(ch, tau, CompensationMode::quadratic_ls);
    const auto ideal = sumfreq_trace(ch, tau, CompensationMode::ideal);
    for (const auto* r : {&none, &quad, &ls, &ideal}) {
        CHECK(trapezoid(tau, r->trace.values) == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : r->trace.values)
            CHECK(v >= 0.0);
    }
    const double wi = fwhm(tau, ideal.trace.values), wq = fwhm(tau, quad.trace.values);
    const double wl = fwhm(tau, ls.trace.values), wn = fwhm(tau, none.trace.values);
    CHECK(wi <= wq);
    CHECK(wq <= wl);
    CHECK(wq <= wn);
    CHECK(wq / wi == doctest::Approx(2.0).epsilon(0.5));
    // refinement only ever raises the peak above the least-squares seed
    CHECK(*std::max_element(quad.trace.values.begin(), quad.trace.values.end()) >=
          *std::max_element(ls.trace.values.begin(), ls.trace.values.end()));
    // ideal mode equals the transform of |Phi|
    SpectralSlice mod = ch;
    for (auto& v : mod.values)
        v = std::abs(v);
    CHECK(sumfreq_trace(mod, tau, CompensationMode::none).trace.values == ideal.trace.values);
    // correlation time exceeds the entanglement time without compensation
    CHECK(wn >= entanglement_time(hom_trace(ch, tau)));

    Rng rng({8, 0});
    const auto rp = two_photon_amplitude(gen_rps(700, S.l0, 2.1e-6, rng), S.cfg, S.model, g);
    const auto rn = sumfreq_trace(rp, tau, CompensationMode::none);
    const auto rq = sumfreq_trace(rp, tau, CompensationMode::quadratic);
    CHECK(fwhm(tau, rn.trace.values) >= fwhm(tau, rq.trace.values));
    CHECK(fwhm(tau, rn.trace.values) >= entanglement_time(hom_trace(rp, tau)));
}

TEST_CASE("ensemble sum-frequency trace against the direct double sum")
{
    Setup S;
    const auto g = S.grid(48, 0.3);
    const auto tau = tau_grid(60e-15, 31);
    const auto fam = S.rps(1.5e-6);
    const auto tr = sumfreq_trace_ensemble(fam, S.cfg, S.model, g, tau);
    const auto dk = mismatch_on_grid(S.model, g);
    const auto g2 = coupling_squared(S.model, S.cfg, g);
    const std::size_t M = g.size();
    std::vector<double> w(M, g.step());
    w.front() *= 0.5;
    w.back() *= 0.5;
    std::vector<double> I(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j) {
                const double ai = w[i] * std::sqrt(g.omega_s[i] * g.omega_i(i) * g2[i]);
                const double aj = w[j] * std::sqrt(g.omega_s[j] * g.omega_i(j) * g2[j]);
                acc += ai * aj * family_xcorr(fam, dk[i], dk[j]) *
                       std::exp(cplx(0.0, -(g.omega_s[i] - g.omega_s[j]) * tau[k]));
            }
        I[k] = acc.real();
    }
    const double area = trapezoid(tau, I);
    for (std::size_t k = 0; k < tau.size(); ++k)
        CHECK(tr.values[k] == doctest::Approx(I[k] / area).epsilon(1e-8));

    // chirped family uses the factorized product
    const auto ch = S.chirp(2.5e6);
    const auto tc = sumfreq_trace_ensemble(ch, S.cfg, S.model, g, tau);
    const auto td = sumfreq_trace(two_photon_amplitude(ch, S.cfg, S.model, g), tau, CompensationMode::none);
    for (std::size_t k = 0; k < tau.size(); ++k)
        CHECK(tc.values[k] == doctest::Approx(td.trace.values[k]).epsilon(1e-8));
}

TEST_CASE("Monte Carlo ideal-compensated ensemble trace is deterministic")
{
    Setup S;
    const auto g = S.grid(256);
    const auto tau = tau_grid(50e-15, 101);
    const auto a = sumfreq_trace_mc(S.rps_spec(2e-6), S.cfg, S.model, g, tau, CompensationMode::ideal, 40, {1, 0}, 1);
    const auto b = sumfreq_trace_mc(S.rps_spec(2e-6), S.cfg, S.model, g, tau, CompensationMode::ideal, 40, {1, 0}, 3);
    CHECK(a.values == b.values);
    CHECK(trapezoid(tau, a.values) == doctest::Approx(1.0).epsilon(1e-12));
}
