#pragma once

// Intrinsic graphs of sampled functions: graph distances, intrinsic Lipschitz
// constants, Stepanov classification and graph translation.

#include "hgraph/function.hpp"
#include "hgraph/metrics.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hgraph {

/// A pair counts as "no cone opening works" once its V-increment exceeds this
/// multiple of its W-increment.
inline constexpr double kInfiniteRatio = 1e6;

struct ScanOptions {
    bool prune = true;     ///< cell-list pruning; never changes results
    unsigned threads = 1;  ///< 0 = hardware concurrency
};

struct PairNorms {
    double w = 0.0;  ///< ||(p^{-1} q)_W||
    double v = 0.0;  ///< ||(p^{-1} q)_V||
};

PairNorms pair_norms(const Splitting& s, const Metric& metric, const Point& p, const Point& q);

/// Ratio v / w with the infinity convention; returns +inf for infinite pairs.
double pair_ratio(const PairNorms& pn);

struct LipschitzResult {
    double constant = 0.0;  ///< +inf when `infinite`
    bool infinite = false;
    std::size_t from = 0;   ///< argmax ordered pair (node indices)
    std::size_t to = 0;
    std::size_t pairs_evaluated = 0;
};

/// Sup over ordered pairs of graph points over E of ||(p^{-1}q)_V|| / ||(p^{-1}q)_W||.
/// `subset` selects E (empty = all active nodes). Requires |E| >= 2.
LipschitzResult lipschitz_constant(const SampledFunction& f, const Metric& metric,
                                   std::span<const std::uint8_t> subset = {}, ScanOptions options = {});

/// 1/2 (||(p1^{-1}p2)_W|| + ||(p2^{-1}p1)_W||).
double graph_quasidistance(const SampledFunction& f, const Metric& metric, std::span<const double> w1,
                           std::span<const double> w2);
double graph_quasidistance(const SampledFunction& f, const Metric& metric, std::size_t i, std::size_t j);

/// For each r, the max pair ratio over (w, y) with y a node of the open ball B_W(w, r).
std::vector<double> pointwise_lip_profile(const SampledFunction& f, const Metric& metric, std::size_t node,
                                          std::span<const double> radii, ScanOptions options = {});

/// Radius used as the finite-data stand-in for the limsup: two horizontal grid steps.
double profile_floor_radius(const SampledFunction& f);

struct LipReport {
    LipschitzResult global;
    int j_max = 0;
    /// Per node: smallest j <= j_max satisfying the C_j condition, 0 for none,
    /// -1 for masked nodes.
    std::vector<int> labels;
    std::vector<double> radii;
    /// Node-major, radii.size() values per node; empty when no radii were requested.
    std::vector<double> profiles;

    double profile(std::size_t node, std::size_t r) const { return profiles[node * radii.size() + r]; }
    std::size_t labeled_count() const;
};

/// Labels each active node with the smallest j such that no other grid graph
/// point over B_W(w, 1/j) lies in the closed cone C_{1/j}(w . phi(w)).
LipReport classify_stepanov(const SampledFunction& f, const Metric& metric, int j_max,
                            std::span<const double> radii = {}, ScanOptions options = {});

/// Partition of C_j = {label in [1, j]} into cells of W-diameter < 1/j.
std::vector<std::vector<std::size_t>> stepanov_cells(const SampledFunction& f, const Metric& metric,
                                                     const LipReport& report, int j);

/// Lipschitz constant of f restricted to each cell.
std::vector<LipschitzResult> cell_lipschitz_constants(const SampledFunction& f, const Metric& metric,
                                                      const std::vector<std::vector<std::size_t>>& cells,
                                                      ScanOptions options = {});

struct TranslatedFunction {
    SampledFunction function;
    double interpolation_error = 0.0;  ///< max |multilinear - nearest| over active nodes
    std::size_t masked_nodes = 0;      ///< nodes whose argument left the domain
};

/// phi_wbar(w) = phi(wbar)^{-1} . phi(wbar . phi(wbar) . w . phi(wbar)^{-1}) sampled on
/// the centered version of f's grid, so that phi_wbar(0) = 0 exactly.
TranslatedFunction translate_function(const SampledFunction& f, std::span<const double> wbar);
TranslatedFunction translate_function(const SampledFunction& f, std::size_t base_node);

/// Index of the origin node of a centered grid.
std::size_t center_node(const Grid& grid);

/// For a V -> W function g with graph map Phi(v) = v . g(v): for each r the max over
/// nodes v with 0 < ||vbar^{-1} v|| < r of ||Phi(vbar)^{-1} Phi(v)|| / ||vbar^{-1} v||.
std::vector<double> graphmap_metric_lip_profile(const SampledFunction& g, const Metric& metric, std::size_t base_node,
                                                std::span<const double> radii);

}  // namespace hgraph
