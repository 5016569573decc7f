#include "spdc/random.hpp"

#include <cmath>

namespace spdc {

RandomSource substream(const RandomSource& parent, std::uint64_t index)
{
    // splitmix64 finalizer mixes the parent stream with the index
    std::uint64_t z = parent.stream + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return {parent.seed, z};
}

Rng::Rng(const RandomSource& src)
{
    std::seed_seq seq{static_cast<std::uint32_t>(src.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(src.seed >> 32),
                      static_cast<std::uint32_t>(src.stream & 0xffffffffu),
                      static_cast<std::uint32_t>(src.stream >> 32)};
    engine_.seed(seq);
}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos()
{
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0)
        return 0;
    // rejection keeps the draw unbiased
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

} // namespace spdc
