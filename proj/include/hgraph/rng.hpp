#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, counter, lane), so sampling loops can be split across any
// number of workers without changing results.

#include <cstdint>
#include <string_view>

namespace hgraph {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Derives a child seed from a parent seed and a task label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t bits(std::uint64_t counter, std::uint64_t lane = 0) const;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter, std::uint64_t lane = 0) const;
    double uniform(std::uint64_t counter, std::uint64_t lane, double lo, double hi) const;

    /// Standard normal (Box-Muller over lanes 2*lane and 2*lane + 1).
    double normal(std::uint64_t counter, std::uint64_t lane = 0) const;

private:
    std::uint64_t key_;
};

}  // namespace hgraph
