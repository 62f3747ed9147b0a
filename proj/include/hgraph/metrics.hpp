#pragma once

// Left-invariant homogeneous norms on H^n.
//
//   Infinity:           max(|(x, y)|, 2 |t|^{1/2})
//   Koranyi:            ((|x|^2 + |y|^2)^2 + 16 t^2)^{1/4}
//   CarnotCaratheodory: certified upper bound from a piecewise-constant
//                       horizontal control (see cc_upper)

#include "hgraph/group.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hgraph {

enum class MetricKind { Infinity, Koranyi, CarnotCaratheodory };

struct CcParams {
    int segments = 16;     ///< K, number of constant-control pieces
    int restarts = 4;      ///< optimizer starts (the first one is deterministic)
    int iterations = 600;  ///< descent iterations per penalty round
    std::uint64_t seed = 0x5eed;

    void validate() const;
    bool operator==(const CcParams&) const = default;
};

class Metric {
public:
    Metric() = default;

    static Metric infinity() { return Metric(MetricKind::Infinity); }
    static Metric koranyi() { return Metric(MetricKind::Koranyi); }
    static Metric carnot_caratheodory(CcParams params = {});

    /// Accepts "infinity", "koranyi" or "cc".
    static Metric parse(std::string_view name);

    MetricKind kind() const { return kind_; }
    const CcParams& cc_params() const { return cc_; }
    std::string name() const;

    bool operator==(const Metric&) const = default;

private:
    explicit Metric(MetricKind k) : kind_(k) {}

    MetricKind kind_ = MetricKind::Infinity;
    CcParams cc_;
};

double norm(const Metric& metric, const Point& p);

/// d(p, q) = ||p^{-1} q||.
double distance(const Metric& metric, const Point& p, const Point& q);

double infinity_norm(const Point& p);
double koranyi_norm(const Point& p);

struct CcResult {
    double value = 0.0;           ///< L^1 cost of the best control found
    bool certified = false;       ///< endpoint reached within tolerance
    double endpoint_error = 0.0;  ///< max coordinate error, in d_inf-normalized coordinates
    HorizontalControl control;    ///< the control realizing `value` (durations sum to 1)
};

/// Endpoint tolerance for cc_upper, measured after normalizing p to unit d_inf norm.
inline constexpr double kCcEndpointTol = 1e-9;

/// Upper bound on d_cc(0, p): the cheapest K-segment control whose flow from 0
/// ends at p. Multi-start penalty descent followed by an exact Gauss-Newton
/// projection onto the endpoint constraint. The K-segment search is seeded with
/// the (K-1)-segment optimum padded by a null segment, so the value is
/// nonincreasing in K; it is nonincreasing in `restarts` because starts are a
/// prefix-stable sequence.
CcResult cc_upper(const Point& p, const CcParams& params = {});

struct EquivalenceConstants {
    double c_low = 0.0;
    double c_high = 0.0;
};

/// Empirical min/max of norm(second, p) / norm(first, p) over random points
/// normalized to the unit sphere of `first`.
EquivalenceConstants equivalence_constants(const Metric& first, const Metric& second, int n, std::size_t samples,
                                           std::uint64_t seed);

}  // namespace hgraph
