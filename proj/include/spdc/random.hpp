#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace spdc {

/// Identifies one reproducible random stream.
struct RandomSource {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Derive the source for a sub-task (scenario point, realization, ...).
RandomSource substream(const RandomSource& parent, std::uint64_t index);

/// mt19937_64 seeded through seed_seq from (seed, stream). The engine and
/// seed_seq algorithms are fixed by the standard, and the conversions below
/// are written out by hand, so draws are identical across platforms.
class Rng {
public:
    explicit Rng(const RandomSource& src);

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_pos();
    /// Standard normal (Marsaglia polar method, pairs cached).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace spdc
