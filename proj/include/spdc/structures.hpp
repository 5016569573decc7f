#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spdc/random.hpp"

namespace spdc {

enum class StructureKind { ideal, rps, weakly_random, chirped, perturbed, shuffled };

std::string kind_name(StructureKind k);
StructureKind kind_from_name(const std::string& name);

/// Domain boundaries z_0 < z_1 < ... < z_N (metres). Domain n spans
/// [z_{n-1}, z_n] and carries the sign (-1)^(n-1), so the first domain is positive.
struct PolingStructure {
    std::vector<double> boundaries;
    StructureKind kind = StructureKind::ideal;
    /// Monotonicity rejections spent while generating (telemetry).
    std::size_t rejections = 0;

    std::size_t domain_count() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }
    double length() const { return boundaries.back() - boundaries.front(); }
    std::vector<double> domain_lengths() const;
    /// Throws ParameterError when the ordering invariant is violated.
    void validate() const;
};

/// Parameters of a structure family. sigma follows the convention of the
/// characteristic function exp(-sigma^2 q^2 / 4): the per-draw Gaussian
/// standard deviation is sigma / sqrt(2).
struct StructureSpec {
    StructureKind kind = StructureKind::ideal;
    std::size_t N_L = 700;
    double l0 = 0.0;
    double sigma = 0.0;
    double zeta = 0.0;
    double sigma_er = 0.0;
    std::size_t segment_d = 1;
};

/// Rejection rate above which a generator gives up (a single rejection is tolerated).
inline constexpr double max_rejection_rate = 1e-3;

PolingStructure gen_ideal(std::size_t N_L, double l0);
PolingStructure gen_rps(std::size_t N_L, double l0, double sigma, Rng& rng);
PolingStructure gen_weakly_random(std::size_t N_L, double l0, double sigma, Rng& rng);
/// z_n = -L + n l0 + zeta' (n - N/2)^2 l0^2 with zeta' = zeta / dk0, shifted by
/// a constant so that z_0 = -L and z_N = 0.
PolingStructure gen_chirped(std::size_t N_L, double l0, double zeta, double dk0);

/// Draw one structure of kind ideal, rps, weakly_random or chirped (dk0 = pi / l0).
PolingStructure generate_structure(const StructureSpec& spec, Rng& rng);

enum class FabricationModel {
    /// each domain length gets an independent error; boundaries rebuilt from z_0
    domain_length,
    /// each interior boundary is displaced independently; faces stay fixed
    boundary
};

std::string fabrication_model_name(FabricationModel m);
FabricationModel fabrication_model_from_name(const std::string& name);

PolingStructure apply_fabrication_error(const PolingStructure& s, double sigma_er, Rng& rng,
                                        FabricationModel model = FabricationModel::domain_length);

/// Cut the domain-length sequence into runs of d lengths, permute the runs
/// uniformly and rebuild from z_0. A short final run takes part in the permutation.
PolingStructure shuffle_segments(const PolingStructure& s, std::size_t d, Rng& rng);

struct Histogram {
    double origin = 0.0;
    double bin_width = 0.0;
    std::vector<std::size_t> counts;

    std::size_t total() const;
    double bin_center(std::size_t i) const { return origin + (static_cast<double>(i) + 0.5) * bin_width; }
};

/// Histogram of domain lengths; the first bin is centred on the shortest domain.
Histogram domain_length_histogram(const PolingStructure& s, double bin_width);

/// Sample mean and standard deviation of the domain lengths.
struct LengthMoments {
    double mean;
    double stddev;
};
LengthMoments domain_length_moments(const PolingStructure& s);

} // namespace spdc
