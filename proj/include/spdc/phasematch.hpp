#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>

#include "spdc/structures.hpp"

namespace spdc {

using cplx = std::complex<double>;

/// dk_total = dk0 + dk.
struct PhaseMismatchPoint {
    double delta_k_total;
    double delta_k;
    double delta_k0;

    static PhaseMismatchPoint from_total(double dk_total, double dk0)
    {
        return {dk_total, dk_total - dk0, dk0};
    }
    static PhaseMismatchPoint from_detuning(double dk, double dk0) { return {dk0 + dk, dk, dk0}; }
};

/// Switch point for the series branches of removable singularities.
inline constexpr double singular_threshold = 1e-6;

/// G(q) = exp(-sigma^2 q^2 / 4).
double gaussian_cf(double q, double sigma);

/// Exact integral of the alternating-sign profile, domain by domain (units m).
cplx f_exact(const PolingStructure& s, double dk);
/// f_exact on many mismatch values at once.
void f_exact_many(const PolingStructure& s, std::span<const double> dk, std::span<cplx> out);

/// (2i/dk) sum_n (-1)^n exp(i dk z_n); throws DomainError at dk = 0.
cplx f_boundary_sum(const PolingStructure& s, double dk);
void f_boundary_sum_many(const PolingStructure& s, std::span<const double> dk,
                         std::span<cplx> out);

/// Ensemble mean of |F|^2 for cumulative random-walk structures (boundary-sum statistics).
double avg_f2_rps(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double sigma);

struct AsymptoticEstimate {
    double value;
    /// sigma^2 dk0^2 N_L / 2; the estimate needs this to be >> 1
    double validity;
};

/// Large-N limit of avg_f2_rps: 4(N+1)/Dk^2 (1 - G^2) / (1 - 2G cos(dk l0) + G^2).
AsymptoticEstimate avg_f2_rps_asymptotic(const PhaseMismatchPoint& p, std::size_t N_L, double l0,
                                         double sigma);
/// The same limit in the form 2N/Dk^2 (1 - G) / (1 - 2G cos(dk l0) + G^2); smaller than
/// avg_f2_rps_asymptotic by the factor 2(1 + G).
AsymptoticEstimate avg_f2_rps_asymptotic_printed(const PhaseMismatchPoint& p, std::size_t N_L,
                                                 double l0, double sigma);

/// Ensemble mean of |F|^2 for boundaries jittered about the ideal grid.
double avg_f2_weak(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double sigma);

/// Closed form for the chirped layout of gen_chirped (z_0 = -L, z_N = 0), obtained by
/// replacing the boundary sum with its trapezoid-corrected integral.
cplx f_chirp(const PhaseMismatchPoint& p, std::size_t N_L, double l0, double zeta_prime);
/// Reference form with the erf arguments f(+-N/2) written directly in dk and zeta'.
cplx f_chirp_printed(const PhaseMismatchPoint& p, std::size_t N_L, double l0,
                     double zeta_prime);

/// <F(dk) F*(dk')> for cumulative random-walk structures; arguments are total mismatches.
cplx xcorr_rps(double dk, double dk_prime, std::size_t N_L, double l0, double sigma);
/// <F(dk) F*(dk')> for weakly-random structures.
cplx xcorr_weak(double dk, double dk_prime, std::size_t N_L, double l0, double sigma);
/// F^chirp(dk) F^chirp*(dk').
cplx xcorr_chirp(double dk, double dk_prime, std::size_t N_L, double l0, double zeta_prime);

/// A structure family treated analytically (ensemble statistics or closed forms).
enum class Family { ideal, rps, weakly_random, chirped };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct AnalyticFamily {
    Family family = Family::rps;
    std::size_t N_L = 700;
    double l0 = 0.0;
    double sigma = 0.0;
    /// chirp parameter zeta (1/m^2); zeta' = zeta / dk0 with dk0 = pi / l0
    double zeta = 0.0;

    double dk0() const;
    double zeta_prime() const { return zeta / dk0(); }
};

/// <|F|^2> of the family at total mismatch dk.
double family_mean_f2(const AnalyticFamily& fam, double dk);
/// <F(dk) F*(dk')> of the family.
cplx family_xcorr(const AnalyticFamily& fam, double dk, double dk_prime);

} // namespace spdc
