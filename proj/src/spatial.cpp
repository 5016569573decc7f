#include "spdc/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "spdc/constants.hpp"
#include "spdc/errors.hpp"
#include "spdc/parallel.hpp"

namespace spdc {

namespace {

constexpr double two_pi = 2.0 * constants::pi;

const AnalyticFamily* family_of(const SpatialSource& src)
{
    return std::get_if<AnalyticFamily>(&src);
}

double coupling_prefactor(const ProcessConfig& cfg)
{
    return cfg.chi2 * cfg.chi2 * cfg.pump_amplitude * cfg.pump_amplitude /
           (4.0 * constants::c * constants::c * constants::pi * constants::pi);
}

/// F at total mismatch dk for a deterministic source.
cplx f_point(const SpatialSource& src, double dk)
{
    if (const auto* s = std::get_if<PolingStructure>(&src))
        return f_exact(*s, dk);
    const auto& fam = std::get<AnalyticFamily>(src);
    if (fam.family == Family::chirped)
        return f_chirp(PhaseMismatchPoint::from_total(dk, fam.dk0()), fam.N_L, fam.l0,
                       fam.zeta_prime());
    if (fam.family == Family::ideal)
        return f_exact(gen_ideal(fam.N_L, fam.l0), dk);
    throw ParameterError("family '" + family_name(fam.family) +
                         "' is an ensemble and has no single amplitude");
}

double f2_point(const SpatialSource& src, double dk)
{
    if (is_ensemble(src))
        return family_mean_f2(std::get<AnalyticFamily>(src), dk);
    return std::norm(f_point(src, dk));
}

/// |F|^2 on a uniform mismatch table with cubic interpolation. Coherent sources store
/// F exp(-i dk z_c) (z_c the structure centre), which varies on the scale 4 pi / L;
/// ensembles store the mean |F|^2, which varies on 2 pi / L.
class ResponseTable {
public:
    ResponseTable(const SpatialSource& src, double dk_lo, double dk_hi) : src_(&src)
    {
        double L = 0.0;
        if (const auto* s = std::get_if<PolingStructure>(&src)) {
            L = s->boundaries.back() - s->boundaries.front();
            zc_ = 0.5 * (s->boundaries.back() + s->boundaries.front());
        } else {
            const auto& fam = std::get<AnalyticFamily>(src);
            L = static_cast<double>(fam.N_L) * fam.l0;
            zc_ = -0.5 * L;
        }
        h_ = two_pi / (L * samples_per_period);
        lo_ = dk_lo - 2.0 * h_;
        const auto n = static_cast<std::size_t>(std::ceil((dk_hi - lo_) / h_)) + 3;
        std::vector<double> dk(n);
        for (std::size_t j = 0; j < n; ++j)
            dk[j] = lo_ + h_ * static_cast<double>(j);
        hi_ = dk.back() - 2.0 * h_;
        coherent_ = !is_ensemble(src);
        if (coherent_) {
            G_.resize(n);
            if (const auto* s = std::get_if<PolingStructure>(&src)) {
                f_exact_many(*s, dk, G_);
            } else if (std::get<AnalyticFamily>(src).family == Family::ideal) {
                const auto& fam = std::get<AnalyticFamily>(src);
                f_exact_many(gen_ideal(fam.N_L, fam.l0), dk, G_);
            } else {
                for (std::size_t j = 0; j < n; ++j)
                    G_[j] = f_point(src, dk[j]);
            }
            for (std::size_t j = 0; j < n; ++j)
                G_[j] *= std::polar(1.0, -dk[j] * zc_);
        } else {
            P_.resize(n);
            const auto& fam = std::get<AnalyticFamily>(src);
            for (std::size_t j = 0; j < n; ++j)
                P_[j] = family_mean_f2(fam, dk[j]);
        }
    }

    double f2(double dk) const
    {
        if (!(dk >= lo_ + h_ && dk < hi_))
            return f2_point(*src_, dk);
        const double s = (dk - lo_) / h_;
        const auto i = static_cast<std::size_t>(s);
        const double t = s - static_cast<double>(i);
        const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        if (coherent_)
            return std::norm(w0 * G_[i - 1] + w1 * G_[i] + w2 * G_[i + 1] + w3 * G_[i + 2]);
        return std::max(0.0, w0 * P_[i - 1] + w1 * P_[i] + w2 * P_[i + 1] + w3 * P_[i + 2]);
    }

    static constexpr double samples_per_period = 32.0;

private:
    const SpatialSource* src_;
    bool coherent_ = true;
    double lo_ = 0.0, hi_ = 0.0, h_ = 0.0, zc_ = 0.0;
    std::vector<cplx> G_;
    std::vector<double> P_;
};

/// Pump band nodes (omega_p) and weights.
struct PumpBand {
    std::vector<double> omega;
    std::vector<double> weight;
};

PumpBand pump_band(const ProcessConfig& cfg, double band, std::size_t points)
{
    const double lp = cfg.pump_wavelength;
    const double w_hi = two_pi * constants::c / (lp - 0.5 * band);
    const double w_lo = two_pi * constants::c / (lp + 0.5 * band);
    PumpBand b;
    gauss_legendre(points, w_lo, w_hi, b.omega, b.weight);
    return b;
}

/// Per-(omega_s, omega_p) wavenumbers and coupling.
struct FrequencyPair {
    double ks, ki, kp, g2w;
};

FrequencyPair frequency_pair(const DispersionModel& model, const ProcessConfig& cfg, double ws,
                             double wp, double weight)
{
    const double wi = wp - ws;
    const double ns = model.refractive_index(ws);
    const double ni = model.refractive_index(wi);
    FrequencyPair f;
    f.ks = ns * ws / constants::c;
    f.ki = ni * wi / constants::c;
    f.kp = model.wavenumber(wp);
    f.g2w = weight * coupling_prefactor(cfg) * (ws * wi) / (ns * ni);
    return f;
}

double xy_density(double dkx, double dky, const ProcessConfig& cfg)
{
    return std::exp(-0.5 * (dkx * dkx * cfg.pump_dx * cfg.pump_dx +
                            dky * dky * cfg.pump_dy * cfg.pump_dy));
}

std::vector<double> uniform(double a, double b, std::size_t n)
{
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j)
        x[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
    return x;
}

std::vector<double> trap_weights(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double h = 0.5 * (x[j + 1] - x[j]);
        w[j] += h;
        w[j + 1] += h;
    }
    return w;
}

/// Frequency pairs of a signal grid times a pump band, with quadrature weights.
std::vector<FrequencyPair> frequency_pairs(const DispersionModel& model, const ProcessConfig& cfg,
                                           const std::vector<double>& ws,
                                           const std::vector<double>& ws_weight,
                                           const PumpBand& band)
{
    std::vector<FrequencyPair> out;
    out.reserve(ws.size() * band.omega.size());
    for (std::size_t a = 0; a < ws.size(); ++a)
        for (std::size_t p = 0; p < band.omega.size(); ++p)
            out.push_back(frequency_pair(model, cfg, ws[a], band.omega[p],
                                         ws_weight[a] * band.weight[p]));
    return out;
}

double max_dk(const std::vector<FrequencyPair>& fp, double cos_min)
{
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& f : fp)
        hi = std::max(hi, f.kp - (f.ks + f.ki) * cos_min);
    return hi;
}

double min_dk(const std::vector<FrequencyPair>& fp)
{
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& f : fp)
        lo = std::min(lo, f.kp - f.ks - f.ki);
    return lo;
}

std::vector<double> signal_axis(const ProcessConfig& cfg, double span, std::size_t n)
{
    return SpectralGrid::centered(cfg.omega_s0(), span, n).omega_s;
}

/// Idler quadrature of the signal map at one (theta_s, omega_s).
double signal_point(const ResponseTable& table, const ProcessConfig& cfg,
                    const std::vector<FrequencyPair>& fp, double theta_s, double phi_s,
                    double extent, std::size_t points)
{
    const double st = std::sin(theta_s), ct = std::cos(theta_s);
    const double sp = std::sin(phi_s), cp = std::cos(phi_s);
    double acc = 0.0;
    for (const auto& f : fp) {
        const double tx = f.ks * st * sp, ty = f.ks * st * cp;
        const double hu = extent / (f.ki * cfg.pump_dx);
        const double hv = extent / (f.ki * cfg.pump_dy);
        const double u0 = -tx / f.ki, v0 = -ty / f.ki;
        const double du = 2.0 * hu / static_cast<double>(points - 1);
        const double dv = 2.0 * hv / static_cast<double>(points - 1);
        const double base = f.kp - f.ks * ct;
        double sum = 0.0;
        for (std::size_t a = 0; a < points; ++a) {
            const double u = u0 - hu + du * static_cast<double>(a);
            const double wa = (a == 0 || a + 1 == points) ? 0.5 : 1.0;
            for (std::size_t b = 0; b < points; ++b) {
                const double v = v0 - hv + dv * static_cast<double>(b);
                const double r2 = u * u + v * v;
                if (r2 >= 1.0)
                    continue;
                const double wb = (b == 0 || b + 1 == points) ? 0.5 : 1.0;
                const double ci = std::sqrt(1.0 - r2);
                const double dkz = base - f.ki * ci;
                // sin(th) dth dph = du dv / cos(th)
                sum += wa * wb * table.f2(dkz) * xy_density(tx + f.ki * u, ty + f.ki * v, cfg) / ci;
            }
        }
        acc += f.g2w * sum * du * dv;
    }
    return st * acc;
}

/// Frequency quadrature of the idler density per solid angle at one idler direction.
double idler_point(const ResponseTable& table, const ProcessConfig& cfg,
                   const std::vector<FrequencyPair>& fp, double theta_s, double phi_s,
                   double theta_i, double phi_i)
{
    const double ss = std::sin(theta_s), cs = std::cos(theta_s);
    const double si = std::sin(theta_i), ci = std::cos(theta_i);
    const double ax = ss * std::sin(phi_s), ay = ss * std::cos(phi_s);
    const double bx = si * std::sin(phi_i), by = si * std::cos(phi_i);
    double acc = 0.0;
    for (const auto& f : fp) {
        const double dkz = f.kp - f.ks * cs - f.ki * ci;
        acc += f.g2w * table.f2(dkz) *
               xy_density(f.ks * ax + f.ki * bx, f.ks * ay + f.ki * by, cfg);
    }
    return acc;
}

std::string doubling_warning(const char* what, double err, double tol)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: grid doubling changed the result by %.3g (limit %.3g)",
                  what, err, tol);
    return buf;
}

std::vector<std::size_t> check_rows(std::size_t n, std::size_t count, std::size_t first)
{
    std::vector<std::size_t> r;
    if (count == 0 || n <= first)
        return r;
    const std::size_t m = std::min(count, n - first);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t idx =
            m == 1 ? n - 1 : first + (n - 1 - first) * k / (m - 1);
        if (r.empty() || r.back() != idx)
            r.push_back(idx);
    }
    return r;
}

} // namespace

bool is_ensemble(const SpatialSource& src)
{
    const auto* fam = family_of(src);
    return fam && (fam->family == Family::rps || fam->family == Family::weakly_random);
}

std::string source_label(const SpatialSource& src)
{
    if (const auto* fam = family_of(src))
        return family_name(fam->family) + (is_ensemble(src) ? "-ensemble" : "");
    return kind_name(std::get<PolingStructure>(src).kind) + "-realization";
}

cplx pump_transverse_spectrum(double dkx, double dky, const ProcessConfig& cfg)
{
    if (!(cfg.pump_dx > 0.0) || !(cfg.pump_dy > 0.0))
        throw ParameterError("pump widths must be positive");
    return std::exp(-0.25 * (dkx * dkx * cfg.pump_dx * cfg.pump_dx +
                             dky * dky * cfg.pump_dy * cfg.pump_dy));
}

cplx spatial_amplitude(const SpatialSource& src, const ProcessConfig& cfg,
                       const DispersionModel& model, double omega_s, double omega_i,
                       double theta_s, double phi_s, double theta_i, double phi_i)
{
    const auto dk = vector_mismatch(model, omega_s, omega_i, theta_s, phi_s, theta_i, phi_i);
    const double ns = model.refractive_index(omega_s);
    const double ni = model.refractive_index(omega_i);
    const double g = std::sqrt(cfg.chi2 * cfg.chi2 /
                               (4.0 * constants::c * constants::c * constants::pi * constants::pi) *
                               (omega_s * omega_i) / (ns * ni));
    return cplx(0.0, g) * cfg.pump_amplitude * f_point(src, dk.z) *
           pump_transverse_spectrum(dk.x, dk.y, cfg);
}

double spatial_density(const SpatialSource& src, const ProcessConfig& cfg,
                       const DispersionModel& model, double omega_s, double omega_i,
                       double theta_s, double phi_s, double theta_i, double phi_i)
{
    if (!is_ensemble(src))
        return std::norm(
            spatial_amplitude(src, cfg, model, omega_s, omega_i, theta_s, phi_s, theta_i, phi_i));
    const auto dk = vector_mismatch(model, omega_s, omega_i, theta_s, phi_s, theta_i, phi_i);
    const double ns = model.refractive_index(omega_s);
    const double ni = model.refractive_index(omega_i);
    return coupling_prefactor(cfg) * (omega_s * omega_i) / (ns * ni) *
           family_mean_f2(std::get<AnalyticFamily>(src), dk.z) *
           std::norm(pump_transverse_spectrum(dk.x, dk.y, cfg));
}

void SpatialGrids::validate() const
{
    if (!(pump_band > 0.0) || pump_band_points < 1)
        throw ParameterError("pump band needs a positive width and at least one node");
    if (!(signal_span > 0.0 && signal_span < 1.0) || signal_points < 3)
        throw ParameterError("signal axis needs 0 < span < 1 and at least 3 points");
    if (!(theta_s_max > 0.0 && theta_s_max < 0.5 * constants::pi) || theta_s_points < 2)
        throw ParameterError("signal angle axis needs 0 < theta_s_max < pi/2 and 2+ points");
    if (!(idler_extent > 0.0) || idler_points < 3)
        throw ParameterError("idler quadrature needs a positive extent and 3+ points");
    if (!(theta_i_max > 0.0 && theta_i_max < 0.5 * constants::pi) || theta_i_points < 2 ||
        phi_i_points < 4)
        throw ParameterError("idler grid needs 0 < theta_i_max < pi/2, 2+ radial and 4+ azimuthal points");
    if (!(theta_s_fixed >= 0.0 && theta_s_fixed < 0.5 * constants::pi))
        throw ParameterError("fixed signal angle out of range");
    if (!(convergence_tolerance > 0.0))
        throw ParameterError("convergence tolerance must be positive");
}

void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w)
{
    if (n < 1)
        throw ParameterError("Gauss-Legendre needs at least one node");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(constants::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15)
                break;
        }
        {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
        }
        const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = w[n - 1 - i] = half * wt;
    }
    if (n % 2 == 1)
        x[n / 2] = mid;
}

AngularDensityMap angular_spectral_density(const SpatialSource& src, const ProcessConfig& cfg,
                                           const DispersionModel& model, const SpatialGrids& g,
                                           unsigned threads)
{
    g.validate();
    cfg.validate();
    AngularDensityMap map;
    map.row_name = "theta_s";
    map.col_name = "omega_s";
    map.rows = uniform(0.0, g.theta_s_max, g.theta_s_points);
    map.cols = signal_axis(cfg, g.signal_span, g.signal_points);
    const std::size_t R = map.rows.size(), C = map.cols.size();

    auto pairs_for = [&](std::size_t band_points) {
        const auto band = pump_band(cfg, g.pump_band, band_points);
        std::vector<std::vector<FrequencyPair>> fp(C);
        for (std::size_t c = 0; c < C; ++c)
            fp[c] = frequency_pairs(model, cfg, {map.cols[c]}, {1.0}, band);
        return fp;
    };
    const auto fp = pairs_for(g.pump_band_points);
    const auto fp2 = pairs_for(2 * g.pump_band_points);

    // mismatch range: the idler box reaches at most sin(theta) ~ k_s/k_i sin(theta_s) + extent
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const double max_ext = 2.0 * g.idler_extent / std::min(cfg.pump_dx, cfg.pump_dy);
    for (const auto* set : {&fp, &fp2})
        for (const auto& v : *set)
            for (const auto& f : v) {
                const double r = std::min(1.0, (f.ks * std::sin(g.theta_s_max) + max_ext) / f.ki);
                const double cmin = std::min(std::cos(g.theta_s_max), std::sqrt(1.0 - r * r));
                lo = std::min(lo, min_dk({f}));
                hi = std::max(hi, max_dk({f}, cmin));
            }
    const ResponseTable table(src, lo, hi);

    map.values.assign(R * C, 0.0);
    parallel_for(R * C, threads, [&](std::size_t k) {
        const std::size_t r = k / C, c = k % C;
        map.values[k] = signal_point(table, cfg, fp[c], map.rows[r], g.phi_s, g.idler_extent,
                                     g.idler_points);
    });
    map.peak = *std::max_element(map.values.begin(), map.values.end());

    map.convergence_error = std::numeric_limits<double>::quiet_NaN();
    const auto rows = check_rows(R, g.convergence_rows, 1);
    if (!rows.empty()) {
        std::vector<double> fine(rows.size() * C);
        parallel_for(fine.size(), threads, [&](std::size_t k) {
            const std::size_t r = rows[k / C], c = k % C;
            fine[k] = signal_point(table, cfg, fp2[c], map.rows[r], g.phi_s, g.idler_extent,
                                   2 * g.idler_points - 1);
        });
        double err = 0.0;
        for (std::size_t q = 0; q < rows.size(); ++q) {
            std::vector<double> a(C), b(C);
            for (std::size_t c = 0; c < C; ++c) {
                a[c] = map.at(rows[q], c);
                b[c] = fine[q * C + c];
            }
            const double ia = trapezoid(map.cols, a), ib = trapezoid(map.cols, b);
            if (ib > 0.0)
                err = std::max(err, std::abs(ia - ib) / ib);
        }
        map.convergence_error = err;
        if (err > g.convergence_tolerance)
            map.warnings.push_back(doubling_warning("signal map", err, g.convergence_tolerance));
    }
    return map;
}

RadialProfile radial_photon_density(const AngularDensityMap& map)
{
    RadialProfile p;
    p.theta = map.rows;
    p.values.resize(map.rows.size());
    std::vector<double> row(map.cols.size());
    for (std::size_t r = 0; r < map.rows.size(); ++r) {
        for (std::size_t c = 0; c < map.cols.size(); ++c)
            row[c] = map.at(r, c);
        p.values[r] = trapezoid(map.cols, row);
    }
    p.peak = *std::max_element(p.values.begin(), p.values.end());
    if (!(p.peak > 0.0))
        throw DomainError("radial density is zero everywhere");
    for (auto& v : p.values)
        v /= p.peak;
    p.convergence_error = map.convergence_error;
    p.warnings = map.warnings;
    return p;
}

namespace {

struct IdlerSetup {
    std::vector<FrequencyPair> coarse;
    std::vector<FrequencyPair> fine;
};

IdlerSetup idler_setup(const ProcessConfig& cfg, const DispersionModel& model,
                       const SpatialGrids& g)
{
    IdlerSetup s;
    const auto ws = signal_axis(cfg, g.signal_span, g.signal_points);
    s.coarse = frequency_pairs(model, cfg, ws, trap_weights(ws),
                               pump_band(cfg, g.pump_band, g.pump_band_points));
    const auto ws2 = signal_axis(cfg, g.signal_span, 2 * g.signal_points - 1);
    s.fine = frequency_pairs(model, cfg, ws2, trap_weights(ws2),
                             pump_band(cfg, g.pump_band, 2 * g.pump_band_points));
    return s;
}

ResponseTable idler_table(const SpatialSource& src, const IdlerSetup& s, double theta_s,
                          double theta_i_max)
{
    const double cmin = std::min(std::cos(theta_s), std::cos(theta_i_max));
    const double lo = std::min(min_dk(s.coarse), min_dk(s.fine));
    const double hi = std::max(max_dk(s.coarse, cmin), max_dk(s.fine, cmin));
    return ResponseTable(src, lo, hi);
}

double signal_factor(double theta_s)
{
    return theta_s == 0.0 ? 1.0 : std::sin(theta_s);
}

} // namespace

AngularDensityMap correlated_area(const SpatialSource& src, const ProcessConfig& cfg,
                                  const DispersionModel& model, const SpatialGrids& g,
                                  unsigned threads)
{
    g.validate();
    cfg.validate();
    const auto setup = idler_setup(cfg, model, g);
    const auto table = idler_table(src, setup, g.theta_s_fixed, g.theta_i_max);
    AngularDensityMap map;
    map.row_name = "theta_i";
    map.col_name = "phi_i";
    map.rows = uniform(0.0, g.theta_i_max, g.theta_i_points);
    map.cols.resize(g.phi_i_points);
    for (std::size_t c = 0; c < g.phi_i_points; ++c)
        map.cols[c] = two_pi * static_cast<double>(c) / static_cast<double>(g.phi_i_points);
    const std::size_t R = map.rows.size(), C = map.cols.size();
    const double sf = signal_factor(g.theta_s_fixed);
    auto eval = [&](const std::vector<FrequencyPair>& fp, std::size_t r, std::size_t c) {
        return sf * std::sin(map.rows[r]) *
               idler_point(table, cfg, fp, g.theta_s_fixed, g.phi_s_fixed, map.rows[r],
                           map.cols[c]);
    };
    map.values.assign(R * C, 0.0);
    parallel_for(R * C, threads,
                 [&](std::size_t k) { map.values[k] = eval(setup.coarse, k / C, k % C); });
    map.peak = *std::max_element(map.values.begin(), map.values.end());

    map.convergence_error = std::numeric_limits<double>::quiet_NaN();
    const auto rows = check_rows(R, g.convergence_rows, 1);
    if (!rows.empty() && map.peak > 0.0) {
        std::vector<double> fine(rows.size());
        parallel_for(rows.size(), threads,
                     [&](std::size_t q) { fine[q] = eval(setup.fine, rows[q], 0); });
        double err = 0.0;
        for (std::size_t q = 0; q < rows.size(); ++q)
            err = std::max(err, std::abs(map.at(rows[q], 0) - fine[q]) / map.peak);
        map.convergence_error = err;
        if (err > g.convergence_tolerance)
            map.warnings.push_back(doubling_warning("correlated area", err, g.convergence_tolerance));
    }
    return map;
}

std::vector<double> signed_theta_grid(double theta_max, std::size_t half_points)
{
    if (!(theta_max > 0.0) || half_points < 2)
        throw ParameterError("signed angle grid needs theta_max > 0 and 2+ points");
    const std::size_t n = 2 * half_points - 1;
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = (static_cast<double>(j) - static_cast<double>(half_points - 1)) /
                         static_cast<double>(half_points - 1);
        t[j] = theta_max * s;
    }
    t[half_points - 1] = 0.0;
    return t;
}

RadialProfile correlated_profile(const SpatialSource& src, const ProcessConfig& cfg,
                                 const DispersionModel& model, const SpatialGrids& g,
                                 const std::vector<double>& theta, unsigned threads)
{
    g.validate();
    cfg.validate();
    if (theta.size() < 3)
        throw ParameterError("correlated profile needs at least 3 angles");
    double tmax = 0.0;
    for (double t : theta)
        tmax = std::max(tmax, std::abs(t));
    if (!(tmax < 0.5 * constants::pi))
        throw ParameterError("correlated profile angles must stay below pi/2");
    const auto setup = idler_setup(cfg, model, g);
    const auto table = idler_table(src, setup, g.theta_s_fixed, tmax);
    const double sf = signal_factor(g.theta_s_fixed);
    auto eval = [&](const std::vector<FrequencyPair>& fp, double t) {
        const double phi = t >= 0.0 ? constants::pi : 0.0;
        return sf * idler_point(table, cfg, fp, g.theta_s_fixed, g.phi_s_fixed, std::abs(t), phi);
    };
    RadialProfile p;
    p.theta = theta;
    p.values.resize(theta.size());
    parallel_for(theta.size(), threads,
                 [&](std::size_t k) { p.values[k] = eval(setup.coarse, theta[k]); });
    p.peak = *std::max_element(p.values.begin(), p.values.end());
    if (!(p.peak > 0.0))
        throw DomainError("correlated profile is zero everywhere");

    p.convergence_error = std::numeric_limits<double>::quiet_NaN();
    const auto idx = check_rows(theta.size(), g.convergence_rows, 0);
    if (!idx.empty()) {
        std::vector<double> fine(idx.size());
        parallel_for(idx.size(), threads,
                     [&](std::size_t q) { fine[q] = eval(setup.fine, theta[idx[q]]); });
        double err = 0.0;
        for (std::size_t q = 0; q < idx.size(); ++q)
            err = std::max(err, std::abs(p.values[idx[q]] - fine[q]) / p.peak);
        p.convergence_error = err;
        if (err > g.convergence_tolerance)
            p.warnings.push_back(doubling_warning("correlated profile", err, g.convergence_tolerance));
    }
    for (auto& v : p.values)
        v /= p.peak;
    return p;
}

std::vector<CorrelatedWidth> correlated_width_scan(const SpatialSource& src,
                                                   const ProcessConfig& cfg,
                                                   const DispersionModel& model,
                                                   const SpatialGrids& g,
                                                   const std::vector<double>& pump_widths,
                                                   double extent_factor, std::size_t half_points,
                                                   unsigned threads)
{
    if (pump_widths.empty())
        throw ParameterError("pump-width scan needs at least one width");
    if (!(extent_factor > 0.0))
        throw ParameterError("extent factor must be positive");
    const double ki0 = model.wavenumber(cfg.omega_s0());
    std::vector<CorrelatedWidth> out;
    for (double w : pump_widths) {
        if (!(w > 0.0))
            throw ParameterError("pump widths must be positive");
        ProcessConfig c = cfg;
        c.pump_dx = c.pump_dy = w;
        const double estimate = 2.0 * std::sqrt(2.0 * std::log(2.0)) / (ki0 * w);
        const double tmax = std::min(extent_factor * estimate, 0.4 * constants::pi);
        const auto prof =
            correlated_profile(src, c, model, g, signed_theta_grid(tmax, half_points), threads);
        out.push_back({w, fwhm(prof.theta, prof.values), prof.convergence_error});
    }
    return out;
}

bool has_spectral_splitting(const AngularDensityMap& map, std::size_t row, double min_contrast)
{
    const std::size_t C = map.cols.size();
    if (row >= map.rows.size() || C < 3)
        throw ParameterError("splitting check: row out of range");
    const std::size_t c0 = C / 2;
    double left = 0.0, right = 0.0, top = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        const double v = map.at(row, c);
        top = std::max(top, v);
        if (c < c0)
            left = std::max(left, v);
        else if (c > c0 || C % 2 == 0)
            right = std::max(right, v);
    }
    if (!(top > 0.0))
        return false;
    const double centre = C % 2 == 1 ? map.at(row, c0) : 0.5 * (map.at(row, c0 - 1) + map.at(row, c0));
    return std::min(left, right) - centre > min_contrast * top;
}

} // namespace spdc
