#pragma once

// Pushforward of Lebesgue measure on W under the graph map, as a proxy for the
// spherical Hausdorff measure on intrinsic graphs.

#include "hgraph/function.hpp"
#include "hgraph/metrics.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hgraph {

struct MeasureOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct MeasureEstimate {
    Point center;
    double radius = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    double estimate = 0.0;
    double stderr_ = 0.0;      ///< binomial standard error
    double box_volume = 0.0;
    bool enlarged = false;     ///< the sampling box had to be enlarged once
};

/// Monte Carlo estimate of Leb_W({w in A : d(w . phi(w), p) < r}).
/// Throws std::runtime_error when the sampling box still clips the set after one
/// enlargement.
MeasureEstimate pushforward_ball_measure(const SampledFunction& f, const Metric& metric, const Point& p, double r,
                                         const MeasureOptions& options = {});

struct AhlforsProfile {
    std::vector<double> radii;
    std::vector<MeasureEstimate> estimates;
    std::vector<double> ratios;         ///< mu(B(p, r)) / (2r)^{Q-k}
    std::vector<double> ratio_stderr;
    double min_ratio = 0.0;
    double max_ratio = 0.0;

    double band() const { return min_ratio > 0.0 ? max_ratio / min_ratio : 0.0; }
};

AhlforsProfile ahlfors_profile(const SampledFunction& f, const Metric& metric, const Point& p,
                               std::span<const double> radii, const MeasureOptions& options = {});

struct DensityProfile {
    std::vector<double> radii;
    std::vector<double> density;       ///< mu(E cap B) / mu(B); 0 for skipped radii
    std::vector<std::uint8_t> skipped; ///< denominator estimate was 0
};

/// Density of E (a node mask; a sample belongs to E when its nearest node does).
DensityProfile density_profile(std::span<const std::uint8_t> e_mask, const SampledFunction& f, const Metric& metric,
                               const Point& p, std::span<const double> radii, const MeasureOptions& options = {});

}  // namespace hgraph
