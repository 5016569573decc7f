#include "spdc/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spdc/complex_erf.hpp"
#include "spdc/constants.hpp"
#include "spdc/errors.hpp"

namespace spdc {

namespace {

const cplx I(0.0, 1.0);

// below this |dk| * (longest domain) the per-domain series avoids cancellation
constexpr double small_phase = 1e-3;

void require_nonzero(double dk, const char* what)
{
    if (dk == 0.0 || !std::isfinite(dk))
        throw DomainError(std::string(what) + ": total phase mismatch must be finite and nonzero");
}

void require_family(std::size_t N_L, double l0, double sigma)
{
    if (N_L < 1)
        throw ParameterError("N_L must be at least 1");
    if (!(l0 > 0.0))
        throw ParameterError("l0 must be positive");
    if (!(sigma >= 0.0))
        throw ParameterError("sigma must be non-negative");
}

// sum_{k=0}^{n-1} h^k
cplx geom(cplx h, std::size_t n)
{
    const cplx e = h - 1.0;
    const double nn = static_cast<double>(n);
    if (std::abs(e) < singular_threshold)
        return nn + e * nn * (nn - 1.0) / 2.0 + e * e * nn * (nn - 1.0) * (nn - 2.0) / 6.0;
    return (1.0 - std::pow(h, static_cast<int>(n))) / (1.0 - h);
}

// sum_{j+m<=N} x^j h^m, by the recurrence P_k = h^k + x P_{k-1}
cplx triangle_direct(cplx x, cplx h, std::size_t N)
{
    cplx P = 1.0;
    cplx hk = 1.0;
    cplx T = 1.0;
    for (std::size_t k = 1; k <= N; ++k) {
        hk *= h;
        P = hk + x * P;
        T += P;
    }
    return T;
}

cplx triangle(cplx x, cplx h, std::size_t N)
{
    constexpr double guard = 1e-3;
    if (std::abs(1.0 - x) < guard || std::abs(1.0 - h) < guard || std::abs(x - h) < guard)
        return triangle_direct(x, h, N);
    const int n1 = static_cast<int>(N + 1);
    const cplx hN1 = std::pow(h, n1);
    return ((1.0 - hN1) / (1.0 - h) - x * (std::pow(x, n1) - hN1) / (x - h)) / (1.0 - x);
}

// |sum_{n=0}^{N} exp(i n x)|^2
double dirichlet2(double x, std::size_t N)
{
    const double n1 = static_cast<double>(N + 1);
    const double s = std::sin(0.5 * x);
    if (std::abs(s) < singular_threshold) {
        const double eps = std::remainder(x, 2.0 * constants::pi);
        return n1 * n1 * (1.0 - (n1 * n1 - 1.0) * eps * eps / 12.0);
    }
    const double t = std::sin(0.5 * n1 * x) / s;
    return t * t;
}

cplx chirp_amplitude(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double zp)
{
    const double q = p.delta_k_total;
    const double N = static_cast<double>(N_L);
    const double a = q * zp * l0 * l0;
    const double b = p.delta_k * l0;
    const cplx s = std::sqrt(cplx(0.0, -a));
    const double c = b / (2.0 * a);
    const cplx integral = std::exp(cplx(0.0, -b * b / (4.0 * a))) * std::sqrt(constants::pi) /
                          (2.0 * s) *
                          (complex_erf(s * (0.5 * N + c)) - complex_erf(s * (-0.5 * N + c)));
    auto g = [&](double x) { return std::exp(cplx(0.0, b * x + a * x * x)); };
    const cplx sum = integral + 0.5 * (g(0.5 * N) + g(-0.5 * N));
    const double phase = -q * N * l0 - a * N * N / 4.0 + p.delta_k * l0 * N / 2.0;
    return 2.0 * I / q * std::exp(cplx(0.0, phase)) * sum;
}

} // namespace

double gaussian_cf(double q, double sigma)
{
    return std::exp(-sigma * sigma * q * q / 4.0);
}

cplx f_exact(const PolingStructure& s, double dk)
{
    cplx out;
    f_exact_many(s, std::span<const double>(&dk, 1), std::span<cplx>(&out, 1));
    return out;
}

void f_exact_many(const PolingStructure& s, std::span<const double> dk, std::span<cplx> out)
{
    const auto& z = s.boundaries;
    const std::size_t N = s.domain_count();
    if (N < 1)
        throw ParameterError("structure needs at least one domain");
    double lmax = 0.0;
    for (std::size_t n = 1; n <= N; ++n)
        lmax = std::max(lmax, z[n] - z[n - 1]);
    // c_0 = -1, c_n = 2(-1)^(n-1), c_N = (-1)^(N-1)
    std::vector<double> w(N + 1);
    w[0] = -1.0;
    for (std::size_t n = 1; n < N; ++n)
        w[n] = (n % 2 == 1) ? 2.0 : -2.0;
    w[N] = (N % 2 == 1) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < dk.size(); ++j) {
        const double q = dk[j];
        if (std::abs(q) * lmax < small_phase) {
            // per domain: exp(i q a) l (1 + x/2 + x^2/6 + x^3/24), x = i q l
            cplx acc = 0.0;
            for (std::size_t n = 1; n <= N; ++n) {
                const double l = z[n] - z[n - 1];
                const cplx x(0.0, q * l);
                const cplx phi = 1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0));
                const cplx e = std::exp(cplx(0.0, q * z[n - 1]));
                acc += ((n % 2 == 1) ? 1.0 : -1.0) * e * l * phi;
            }
            out[j] = acc;
            continue;
        }
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n <= N; ++n) {
            const double ph = q * z[n];
            re += w[n] * std::cos(ph);
            im += w[n] * std::sin(ph);
        }
        // (re + i im) / (i q)
        out[j] = cplx(im / q, -re / q);
    }
}

cplx f_boundary_sum(const PolingStructure& s, double dk)
{
    cplx out;
    f_boundary_sum_many(s, std::span<const double>(&dk, 1), std::span<cplx>(&out, 1));
    return out;
}

void f_boundary_sum_many(const PolingStructure& s, std::span<const double> dk,
                         std::span<cplx> out)
{
    const auto& z = s.boundaries;
    for (std::size_t j = 0; j < dk.size(); ++j) {
        const double q = dk[j];
        require_nonzero(q, "f_boundary_sum");
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < z.size(); ++n) {
            const double sg = (n % 2 == 0) ? 1.0 : -1.0;
            const double ph = q * z[n];
            re += sg * std::cos(ph);
            im += sg * std::sin(ph);
        }
        // 2i/q (re + i im)
        out[j] = cplx(-2.0 * im / q, 2.0 * re / q);
    }
}

double avg_f2_rps(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double sigma)
{
    require_family(N_L, l0, sigma);
    const double q = p.delta_k_total;
    require_nonzero(q, "avg_f2_rps");
    const double G = gaussian_cf(q, sigma);
    const double x = p.delta_k * l0;
    const cplx H = std::polar(G, x);
    const double n1 = static_cast<double>(N_L + 1);
    double S;
    if (std::abs(1.0 - H) < singular_threshold) {
        // second order in u = log H about H = 1
        const cplx u(-sigma * sigma * q * q / 4.0, std::remainder(x, 2.0 * constants::pi));
        const double N = static_cast<double>(N_L);
        const double A1 = N * (N + 1.0) * (N + 2.0) / 6.0;
        const double A2 = N * (N + 1.0) * (N + 1.0) * (N + 2.0) / 12.0;
        S = n1 * n1 + 2.0 * u.real() * A1 + (u * u).real() * A2;
    } else {
        const cplx HN1 = std::polar(std::pow(G, n1), n1 * x);
        const cplx one_m = 1.0 - H;
        S = n1 * (1.0 - G * G) / std::norm(one_m) -
            2.0 * (H * (1.0 - HN1) / (one_m * one_m)).real();
    }
    return 4.0 / (q * q) * std::max(S, 0.0);
}

AsymptoticEstimate avg_f2_rps_asymptotic(const PhaseMismatchPoint& p, std::size_t N_L, double l0,
                                         double sigma)
{
    require_family(N_L, l0, sigma);
    const double q = p.delta_k_total;
    require_nonzero(q, "avg_f2_rps_asymptotic");
    const double G = gaussian_cf(q, sigma);
    const double den = 1.0 - 2.0 * G * std::cos(p.delta_k * l0) + G * G;
    const double n1 = static_cast<double>(N_L + 1);
    const double v = sigma * sigma * p.delta_k0 * p.delta_k0 * static_cast<double>(N_L) / 2.0;
    return {4.0 * n1 / (q * q) * (1.0 - G * G) / den, v};
}

AsymptoticEstimate avg_f2_rps_asymptotic_printed(const PhaseMismatchPoint& p, std::size_t N_L,
                                                 double l0, double sigma)
{
    require_family(N_L, l0, sigma);
    const double q = p.delta_k_total;
    require_nonzero(q, "avg_f2_rps_asymptotic_printed");
    const double G = gaussian_cf(q, sigma);
    const double den = 1.0 - 2.0 * G * std::cos(p.delta_k * l0) + G * G;
    const double N = static_cast<double>(N_L);
    const double v = sigma * sigma * p.delta_k0 * p.delta_k0 * N / 2.0;
    return {2.0 * N / (q * q) * (1.0 - G) / den, v};
}

double avg_f2_weak(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double sigma)
{
    require_family(N_L, l0, sigma);
    const double q = p.delta_k_total;
    require_nonzero(q, "avg_f2_weak");
    const double G = gaussian_cf(q, sigma);
    const double n1 = static_cast<double>(N_L + 1);
    // N+1 + G^2 [sum_{d=1}^{N} (N+1-d) e^{idx} + c.c.], the bracket being D^2 - (N+1)
    const double S = n1 + G * G * (dirichlet2(p.delta_k * l0, N_L) - n1);
    return 4.0 / (q * q) * std::max(S, 0.0);
}

cplx f_chirp(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double zeta_prime)
{
    require_family(N_L, l0, 0.0);
    if (zeta_prime == 0.0)
        throw ParameterError("f_chirp: zeta' = 0 is the ideal structure; use the ideal-structure formula");
    if (!(zeta_prime > 0.0))
        throw ParameterError("f_chirp: zeta' must be positive");
    require_nonzero(p.delta_k_total, "f_chirp");
    return chirp_amplitude(p, N_L, l0, zeta_prime);
}

cplx f_chirp_printed(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double zeta_prime)
{
    require_family(N_L, l0, 0.0);
    if (!(zeta_prime > 0.0))
        throw ParameterError("f_chirp_printed: zeta' must be positive");
    const double q = p.delta_k_total;
    const double d = p.delta_k;
    const double N = static_cast<double>(N_L);
    const cplx sq = std::sqrt(cplx(zeta_prime * q, 0.0));
    const cplx rmi = std::sqrt(cplx(0.0, -1.0));
    auto f = [&](double x) { return rmi / 2.0 * (sq * x * l0 + d / sq); };
    const cplx pre = 2.0 * std::sqrt(constants::pi) / (std::sqrt(cplx(0.0, q * q * q * zeta_prime)) * l0);
    return pre * std::exp(cplx(0.0, q * N * l0 / 2.0)) *
           std::exp(cplx(0.0, -d * d / (4.0 * q * zeta_prime))) *
           (complex_erf(f(N / 2.0)) - complex_erf(f(-N / 2.0)));
}

cplx xcorr_rps(double dk, double dk_prime, std::size_t N_L, double l0, double sigma)
{
    require_family(N_L, l0, sigma);
    require_nonzero(dk, "xcorr_rps");
    require_nonzero(dk_prime, "xcorr_rps");
    const double D = dk - dk_prime;
    const double N = static_cast<double>(N_L);
    // pair (n >= m) averages to a^(n-m) h^m, pair (m > n) to b^(m-n) h^n
    const cplx h = std::polar(gaussian_cf(D, sigma), D * l0);
    const cplx a = -std::polar(gaussian_cf(dk, sigma), dk * l0);
    const cplx b = -std::polar(gaussian_cf(dk_prime, sigma), -dk_prime * l0);
    const cplx total = triangle(a, h, N_L) + triangle(b, h, N_L) - geom(h, N_L + 1);
    return 4.0 / (dk * dk_prime) * std::exp(cplx(0.0, -D * N * l0)) * total;
}

cplx xcorr_weak(double dk, double dk_prime, std::size_t N_L, double l0, double sigma)
{
    require_family(N_L, l0, sigma);
    require_nonzero(dk, "xcorr_weak");
    require_nonzero(dk_prime, "xcorr_weak");
    const double D = dk - dk_prime;
    const double N = static_cast<double>(N_L);
    const cplx diag = geom(std::polar(1.0, D * l0), N_L + 1);
    const cplx A = geom(-std::polar(1.0, dk * l0), N_L + 1);
    const cplx Ap = geom(-std::polar(1.0, dk_prime * l0), N_L + 1);
    const double GG = gaussian_cf(dk, sigma) * gaussian_cf(dk_prime, sigma);
    const cplx total = gaussian_cf(D, sigma) * diag + GG * (A * std::conj(Ap) - diag);
    return 4.0 / (dk * dk_prime) * std::exp(cplx(0.0, -D * N * l0)) * total;
}

cplx xcorr_chirp(double dk, double dk_prime, std::size_t N_L, double l0, double zeta_prime)
{
    const double dk0 = constants::pi / l0;
    return f_chirp(PhaseMismatchPoint::from_total(dk, dk0), N_L, l0, zeta_prime) *
           std::conj(f_chirp(PhaseMismatchPoint::from_total(dk_prime, dk0), N_L, l0, zeta_prime));
}

std::string family_name(Family f)
{
    switch (f) {
    case Family::ideal: return "ideal";
    case Family::rps: return "rps";
    case Family::weakly_random: return "weakly-random";
    case Family::chirped: return "chirped";
    }
    return "unknown";
}

Family family_from_name(const std::string& name)
{
    for (auto f : {Family::ideal, Family::rps, Family::weakly_random, Family::chirped})
        if (family_name(f) == name)
            return f;
    throw ParameterError("unknown structure family '" + name + "'");
}

double AnalyticFamily::dk0() const
{
    return constants::pi / l0;
}

double family_mean_f2(const AnalyticFamily& fam, double dk)
{
    const auto p = PhaseMismatchPoint::from_total(dk, fam.dk0());
    switch (fam.family) {
    case Family::ideal: return avg_f2_rps(p, fam.N_L, fam.l0, 0.0);
    case Family::rps: return avg_f2_rps(p, fam.N_L, fam.l0, fam.sigma);
    case Family::weakly_random: return avg_f2_weak(p, fam.N_L, fam.l0, fam.sigma);
    case Family::chirped: return std::norm(f_chirp(p, fam.N_L, fam.l0, fam.zeta_prime()));
    }
    return 0.0;
}

cplx family_xcorr(const AnalyticFamily& fam, double dk, double dk_prime)
{
    switch (fam.family) {
    case Family::ideal: return xcorr_rps(dk, dk_prime, fam.N_L, fam.l0, 0.0);
    case Family::rps: return xcorr_rps(dk, dk_prime, fam.N_L, fam.l0, fam.sigma);
    case Family::weakly_random: return xcorr_weak(dk, dk_prime, fam.N_L, fam.l0, fam.sigma);
    case Family::chirped: return xcorr_chirp(dk, dk_prime, fam.N_L, fam.l0, fam.zeta_prime());
    }
    return 0.0;
}

} // namespace spdc
