#include "spdc/structures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "spdc/constants.hpp"
#include "spdc/errors.hpp"

namespace spdc {

namespace {

PolingStructure make(std::vector<double> z, StructureKind kind, std::size_t rejections = 0)
{
    PolingStructure s;
    s.boundaries = std::move(z);
    s.kind = kind;
    s.rejections = rejections;
    return s;
}

void check_count(std::size_t N_L)
{
    if (N_L < 1)
        throw ParameterError("N_L must be at least 1");
}

void check_l0(double l0)
{
    if (!(l0 > 0.0) || !std::isfinite(l0))
        throw ParameterError("l0 must be positive");
}

void check_rejections(std::size_t rejections, std::size_t draws, const char* what)
{
    const double rate = static_cast<double>(rejections) / static_cast<double>(rejections + draws);
    // a lone rejection in a short structure says nothing about the spread
    if (rejections > 1 && rate > max_rejection_rate) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "%s: monotonicity rejection rate %.3g exceeds %.0e; spread too large", what,
                      rate, max_rejection_rate);
        throw ParameterError(buf);
    }
}

void warn_large_sigma(double sigma, double l0)
{
    if (sigma > l0 / 3.0)
        std::fprintf(stderr, "warning: sigma=%.3g m exceeds l0/3; Gaussian law is truncated\n",
                     sigma);
}

} // namespace

std::string kind_name(StructureKind k)
{
    switch (k) {
    case StructureKind::ideal: return "ideal";
    case StructureKind::rps: return "rps";
    case StructureKind::weakly_random: return "weakly-random";
    case StructureKind::chirped: return "chirped";
    case StructureKind::perturbed: return "perturbed";
    case StructureKind::shuffled: return "shuffled";
    }
    return "unknown";
}

StructureKind kind_from_name(const std::string& name)
{
    for (auto k : {StructureKind::ideal, StructureKind::rps, StructureKind::weakly_random,
                   StructureKind::chirped, StructureKind::perturbed, StructureKind::shuffled})
        if (kind_name(k) == name)
            return k;
    throw ParameterError("unknown structure kind '" + name + "'");
}

std::vector<double> PolingStructure::domain_lengths() const
{
    std::vector<double> l(domain_count());
    for (std::size_t n = 1; n < boundaries.size(); ++n)
        l[n - 1] = boundaries[n] - boundaries[n - 1];
    return l;
}

void PolingStructure::validate() const
{
    if (boundaries.size() < 2)
        throw ParameterError("structure needs at least one domain");
    for (std::size_t n = 1; n < boundaries.size(); ++n) {
        if (!(boundaries[n] > boundaries[n - 1])) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "boundaries not strictly increasing at n=%zu", n);
            throw ParameterError(buf);
        }
    }
}

PolingStructure gen_ideal(std::size_t N_L, double l0)
{
    check_count(N_L);
    check_l0(l0);
    const double L = static_cast<double>(N_L) * l0;
    std::vector<double> z(N_L + 1);
    for (std::size_t n = 0; n <= N_L; ++n)
        z[n] = -L + static_cast<double>(n) * l0;
    z[N_L] = 0.0;
    return make(std::move(z), StructureKind::ideal);
}

PolingStructure gen_rps(std::size_t N_L, double l0, double sigma, Rng& rng)
{
    check_count(N_L);
    check_l0(l0);
    if (!(sigma >= 0.0))
        throw ParameterError("sigma must be non-negative");
    if (sigma == 0.0)
        return gen_ideal(N_L, l0);
    warn_large_sigma(sigma, l0);
    const double sd = sigma / std::sqrt(2.0);
    const double L = static_cast<double>(N_L) * l0;
    std::vector<double> z(N_L + 1);
    z[0] = -L;
    std::size_t rejected = 0;
    for (std::size_t n = 1; n <= N_L; ++n) {
        double dl = rng.normal() * sd;
        while (l0 + dl <= 0.0) {
            ++rejected;
            dl = rng.normal() * sd;
        }
        z[n] = z[n - 1] + l0 + dl;
    }
    check_rejections(rejected, N_L, "gen_rps");
    return make(std::move(z), StructureKind::rps, rejected);
}

PolingStructure gen_weakly_random(std::size_t N_L, double l0, double sigma, Rng& rng)
{
    check_count(N_L);
    check_l0(l0);
    if (!(sigma >= 0.0))
        throw ParameterError("sigma must be non-negative");
    if (sigma == 0.0)
        return gen_ideal(N_L, l0);
    warn_large_sigma(sigma, l0);
    const double sd = sigma / std::sqrt(2.0);
    const double L = static_cast<double>(N_L) * l0;
    std::vector<double> z(N_L + 1);
    z[0] = -L;
    std::size_t rejected = 0;
    for (std::size_t n = 1; n <= N_L; ++n) {
        const double base = -L + static_cast<double>(n) * l0;
        double zn = base + rng.normal() * sd;
        while (zn <= z[n - 1]) {
            ++rejected;
            zn = base + rng.normal() * sd;
        }
        z[n] = zn;
    }
    check_rejections(rejected, N_L, "gen_weakly_random");
    return make(std::move(z), StructureKind::weakly_random, rejected);
}

PolingStructure gen_chirped(std::size_t N_L, double l0, double zeta, double dk0)
{
    check_count(N_L);
    check_l0(l0);
    if (!(dk0 > 0.0))
        throw ParameterError("dk0 must be positive");
    if (!std::isfinite(zeta))
        throw ParameterError("zeta must be finite");
    const double zp = zeta / dk0;
    const double L = static_cast<double>(N_L) * l0;
    const double half = 0.5 * static_cast<double>(N_L);
    const double shift = zp * half * half * l0 * l0;
    std::vector<double> z(N_L + 1);
    for (std::size_t n = 0; n <= N_L; ++n) {
        const double m = static_cast<double>(n) - half;
        z[n] = -L + static_cast<double>(n) * l0 + (zp * m * m * l0 * l0 - shift);
    }
    z[0] = -L;
    z[N_L] = 0.0;
    for (std::size_t n = 1; n <= N_L; ++n) {
        if (!(z[n] > z[n - 1])) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "chirp zeta=%.6g m^-2 gives a non-monotone structure; first violating "
                          "boundary index n=%zu",
                          zeta, n);
            throw ParameterError(buf);
        }
    }
    return make(std::move(z), zeta == 0.0 ? StructureKind::ideal : StructureKind::chirped);
}

PolingStructure generate_structure(const StructureSpec& spec, Rng& rng)
{
    switch (spec.kind) {
    case StructureKind::ideal: return gen_ideal(spec.N_L, spec.l0);
    case StructureKind::rps: return gen_rps(spec.N_L, spec.l0, spec.sigma, rng);
    case StructureKind::weakly_random: return gen_weakly_random(spec.N_L, spec.l0, spec.sigma, rng);
    case StructureKind::chirped:
        check_l0(spec.l0);
        return gen_chirped(spec.N_L, spec.l0, spec.zeta, constants::pi / spec.l0);
    default: break;
    }
    throw ParameterError("generate_structure: kind '" + kind_name(spec.kind) +
                         "' is derived from a base structure, not generated");
}

std::string fabrication_model_name(FabricationModel m)
{
    return m == FabricationModel::domain_length ? "domain-length" : "boundary";
}

FabricationModel fabrication_model_from_name(const std::string& name)
{
    if (name == "domain-length")
        return FabricationModel::domain_length;
    if (name == "boundary")
        return FabricationModel::boundary;
    throw ParameterError("unknown fabrication model '" + name + "' (domain-length | boundary)");
}

PolingStructure apply_fabrication_error(const PolingStructure& s, double sigma_er, Rng& rng,
                                        FabricationModel model)
{
    s.validate();
    if (!(sigma_er >= 0.0))
        throw ParameterError("sigma_er must be non-negative");
    if (sigma_er == 0.0)
        return s;
    const auto& z = s.boundaries;
    const std::size_t N = s.domain_count();
    std::vector<double> out(z.size());
    out[0] = z[0];
    std::size_t rejected = 0;
    if (model == FabricationModel::domain_length) {
        for (std::size_t n = 1; n <= N; ++n) {
            const double l = z[n] - z[n - 1];
            double e = rng.normal() * sigma_er;
            while (l + e <= 0.0) {
                ++rejected;
                e = rng.normal() * sigma_er;
            }
            out[n] = out[n - 1] + (l + e);
        }
    } else {
        out[N] = z[N];
        for (std::size_t n = 1; n < N; ++n) {
            const double upper = (n + 1 == N) ? z[N] : std::numeric_limits<double>::infinity();
            double zn = z[n] + rng.normal() * sigma_er;
            while (zn <= out[n - 1] || zn >= upper) {
                ++rejected;
                zn = z[n] + rng.normal() * sigma_er;
            }
            out[n] = zn;
        }
    }
    check_rejections(rejected, N, "apply_fabrication_error");
    return make(std::move(out), StructureKind::perturbed, rejected);
}

PolingStructure shuffle_segments(const PolingStructure& s, std::size_t d, Rng& rng)
{
    s.validate();
    const std::size_t N = s.domain_count();
    if (d < 1 || d > N)
        throw ParameterError("segment length d must satisfy 1 <= d <= N_L");
    const std::size_t runs = (N + d - 1) / d;
    std::vector<std::size_t> order(runs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = runs; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    PolingStructure out;
    out.kind = StructureKind::shuffled;
    bool identity = true;
    for (std::size_t i = 0; i < runs; ++i)
        identity = identity && order[i] == i;
    if (identity) {
        out.boundaries = s.boundaries;
        return out;
    }
    const auto len = s.domain_lengths();
    out.boundaries.reserve(N + 1);
    out.boundaries.push_back(s.boundaries.front());
    double zc = s.boundaries.front();
    for (std::size_t r : order) {
        const std::size_t b = r * d;
        const std::size_t e = std::min(N, b + d);
        for (std::size_t n = b; n < e; ++n) {
            zc += len[n];
            out.boundaries.push_back(zc);
        }
    }
    return out;
}

std::size_t Histogram::total() const
{
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Histogram domain_length_histogram(const PolingStructure& s, double bin_width)
{
    if (!(bin_width > 0.0))
        throw ParameterError("bin width must be positive");
    const auto len = s.domain_lengths();
    const auto [lo, hi] = std::minmax_element(len.begin(), len.end());
    Histogram h;
    h.bin_width = bin_width;
    h.origin = *lo - 0.5 * bin_width;
    const auto nb = static_cast<std::size_t>(std::floor((*hi - h.origin) / bin_width)) + 1;
    h.counts.assign(nb, 0);
    for (double l : len) {
        auto i = static_cast<std::size_t>(std::floor((l - h.origin) / bin_width));
        h.counts[std::min(i, nb - 1)] += 1;
    }
    return h;
}

LengthMoments domain_length_moments(const PolingStructure& s)
{
    const auto len = s.domain_lengths();
    double m = 0.0;
    for (double l : len)
        m += l;
    m /= static_cast<double>(len.size());
    double v = 0.0;
    for (double l : len)
        v += (l - m) * (l - m);
    v = len.size() > 1 ? v / static_cast<double>(len.size() - 1) : 0.0;
    return {m, std::sqrt(v)};
}

} // namespace spdc
