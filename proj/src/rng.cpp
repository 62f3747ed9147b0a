#include "hgraph/rng.hpp"

#include <cmath>
#include <numbers>

namespace hgraph {

std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label)
{
    // FNV-1a over the label, then mixed with the parent seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(seed ^ mix64(h));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(mix64(seed) ^ (stream * 0xd1342543de82ef95ULL)))
{
}

std::uint64_t CounterRng::bits(std::uint64_t counter, std::uint64_t lane) const
{
    return mix64(key_ ^ mix64(counter * 0x9e3779b97f4a7c15ULL + lane));
}

double CounterRng::uniform(std::uint64_t counter, std::uint64_t lane) const
{
    return static_cast<double>(bits(counter, lane) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(std::uint64_t counter, std::uint64_t lane, double lo, double hi) const
{
    return lo + (hi - lo) * uniform(counter, lane);
}

double CounterRng::normal(std::uint64_t counter, std::uint64_t lane) const
{
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform(counter, 2 * lane);
    const double u2 = uniform(counter, 2 * lane + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hgraph
