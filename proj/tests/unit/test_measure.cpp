#include "common.hpp"

#include "hgraph/measure.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hgraph;
using namespace testutil;

namespace {

MeasureOptions opts(std::size_t samples, unsigned threads = 1)
{
    MeasureOptions o;
    o.samples = samples;
    o.seed = 21;
    o.threads = threads;
    return o;
}

}  // namespace

TEST(Measure, ZeroFunctionBallIsRCubed)
{
    // {max(|y|, 2 sqrt|t|) < r} has area 2r * r^2 / 2 = r^3.
    const auto f = scalar_h1(grid2(9, 9), [](double, double) { return 0.0; });
    for (double r : {0.1, 0.3, 0.5}) {
        const auto e = pushforward_ball_measure(f, Metric::infinity(), Point(1), r, opts(200000));
        EXPECT_NEAR(e.estimate, r * r * r, 3 * e.stderr_) << r;
    }
}

TEST(Measure, DoublingRatioIsEight)
{
    const auto f = scalar_h1(grid2(9, 9), [](double, double) { return 0.0; });
    const auto a = pushforward_ball_measure(f, Metric::infinity(), Point(1), 0.2, opts(200000));
    const auto b = pushforward_ball_measure(f, Metric::infinity(), Point(1), 0.4, opts(200000));
    const double ratio = b.estimate / a.estimate;
    const double sigma = ratio * std::hypot(a.stderr_ / a.estimate, b.stderr_ / b.estimate);
    EXPECT_NEAR(ratio, 8.0, 3 * sigma);
}

TEST(Measure, LinearGraphHasExactBallVolume)
{
    // ||(m y, y, t - m y^2/2)||_inf < r iff |y| < r / sqrt(1 + m^2) and
    // |t - m y^2/2| < r^2/4, so the measure is r^3 / sqrt(1 + m^2).
    const double m = 1.5;
    const auto f = scalar_h1(grid2(33, 33), [m](double y, double) { return m * y; });
    const std::vector<double> radii{0.1, 0.2, 0.4};
    const auto prof = ahlfors_profile(f, Metric::infinity(), Point(1), radii, opts(200000));
    const double want = 1.0 / (8.0 * std::sqrt(1 + m * m));
    for (std::size_t i = 0; i < radii.size(); ++i)
        EXPECT_NEAR(prof.ratios[i], want, 3 * prof.ratio_stderr[i]);
}

TEST(Measure, TinyRadiusVanishes)
{
    const auto f = scalar_h1(grid2(9, 9), [](double, double) { return 0.0; });
    EXPECT_LT(pushforward_ball_measure(f, Metric::infinity(), Point(1), 1e-3, opts(10000)).estimate, 1e-8);
}

TEST(Measure, ThreadCountDoesNotChangeEstimate)
{
    const auto f = scalar_h1(grid2(33, 33), [](double y, double t) { return 0.3 * y + 0.2 * t; });
    const auto a = pushforward_ball_measure(f, Metric::koranyi(), Point(1), 0.3, opts(50000, 1));
    const auto b = pushforward_ball_measure(f, Metric::koranyi(), Point(1), 0.3, opts(50000, 4));
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.estimate, b.estimate);
}

TEST(Measure, BallCoveringTheDomainGivesDomainArea)
{
    const auto f = scalar_h1(grid2(9, 9, 0.2, 0.2), [](double, double) { return 0.0; });
    const auto e = pushforward_ball_measure(f, Metric::infinity(), Point(1), 2.0, opts(1000));
    EXPECT_NEAR(e.estimate, 0.4 * 0.4, 1e-12);
}

TEST(Measure, DensityOfFullHalfAndHole)
{
    const Metric inf = Metric::infinity();
    const Grid g = grid2(201, 201);
    const auto f = scalar_h1(g, [](double, double) { return 0.0; });
    const std::vector<double> radii{0.2, 0.4};
    const std::vector<std::uint8_t> full(g.size(), 1);
    for (double d : density_profile(full, f, inf, Point(1), radii, opts(20000)).density)
        EXPECT_DOUBLE_EQ(d, 1.0);

    std::vector<std::uint8_t> half(g.size()), hole(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto w = g.coords(i);
        half[i] = w[0] > 0.0;
        hole[i] = std::max(std::abs(w[0]), std::abs(w[1])) > 0.5;
    }
    for (double d : density_profile(half, f, inf, Point(1), radii, opts(40000)).density)
        EXPECT_NEAR(d, 0.5, 0.03);
    for (double d : density_profile(hole, f, inf, Point(1), radii, opts(20000)).density)
        EXPECT_EQ(d, 0.0);
}
