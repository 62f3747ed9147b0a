#pragma once

#include "hgraph/function.hpp"
#include "hgraph/metrics.hpp"
#include "hgraph/splitting.hpp"

#include <cmath>
#include <functional>

namespace testutil {

inline hgraph::Point p1(double x, double y, double t)
{
    const double xs[] = {x}, ys[] = {y};
    return hgraph::Point(xs, ys, t);
}

inline hgraph::Grid grid2(int ny, int nt, double ylim = 1.0, double tlim = 1.0)
{
    return hgraph::Grid({hgraph::Axis{-ylim, ylim, ny}, hgraph::Axis{-tlim, tlim, nt}});
}

/// Scalar function of (y, t) on H^1 with the standard splitting.
inline hgraph::SampledFunction scalar_h1(const hgraph::Grid& g, std::function<double(double, double)> phi,
                                         hgraph::Interpolation interp = hgraph::Interpolation::Multilinear)
{
    return hgraph::SampledFunction::sample(
        hgraph::Splitting::standard(1, 1), g,
        [phi](std::span<const double> w, std::span<double> out) { out[0] = phi(w[0], w[1]); }, interp);
}

}  // namespace testutil
