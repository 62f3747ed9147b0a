#include "hgraph/metrics.hpp"
#include "hgraph/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hgraph;

namespace {

Point p1(double x, double y, double t)
{
    const double xs[] = {x}, ys[] = {y};
    return Point(xs, ys, t);
}

}  // namespace

TEST(Metrics, NormValues)
{
    EXPECT_DOUBLE_EQ(infinity_norm(p1(3, 4, 0)), 5.0);
    EXPECT_DOUBLE_EQ(infinity_norm(p1(0, 0, 1)), 2.0);
    EXPECT_DOUBLE_EQ(koranyi_norm(p1(0, 0, 1)), 2.0);
    EXPECT_DOUBLE_EQ(koranyi_norm(p1(3, 4, 0)), 5.0);
    for (const Metric& m : {Metric::infinity(), Metric::koranyi(), Metric::carnot_caratheodory()})
        EXPECT_EQ(norm(m, Point(1)), 0.0);
}

TEST(Metrics, DistanceValues)
{
    const Metric inf = Metric::infinity();
    EXPECT_DOUBLE_EQ(distance(inf, Point(1), p1(0, 0, 1)), 2.0);
    const Point p = p1(0.3, 0.1, -2);
    EXPECT_EQ(distance(inf, p, p), 0.0);
}

TEST(Metrics, LeftInvarianceAndHomogeneity)
{
    const CounterRng rng(5);
    for (const Metric& m : {Metric::infinity(), Metric::koranyi()})
        for (std::uint64_t c = 0; c < 500; ++c) {
            const Point r = p1(rng.uniform(c, 0, -2, 2), rng.uniform(c, 1, -2, 2), rng.uniform(c, 2, -2, 2));
            const Point p = p1(rng.uniform(c, 3, -2, 2), rng.uniform(c, 4, -2, 2), rng.uniform(c, 5, -2, 2));
            const Point q = p1(rng.uniform(c, 6, -2, 2), rng.uniform(c, 7, -2, 2), rng.uniform(c, 8, -2, 2));
            EXPECT_NEAR(distance(m, r * p, r * q), distance(m, p, q), 1e-12);
            EXPECT_NEAR(norm(m, dilate(2.5, p)), 2.5 * norm(m, p), 1e-12);
            EXPECT_NEAR(norm(m, inverse(p)), norm(m, p), 1e-12);
        }
}

TEST(Metrics, TriangleInequalityOnRandomTriples)
{
    const CounterRng rng(6);
    for (const Metric& m : {Metric::infinity(), Metric::koranyi()})
        for (std::uint64_t c = 0; c < 3000; ++c) {
            Point a(2), b(2), d(2);
            for (int i = 0; i < 4; ++i) {
                a.h(i) = rng.uniform(c, i, -1, 1);
                b.h(i) = rng.uniform(c, 4 + i, -1, 1);
                d.h(i) = rng.uniform(c, 8 + i, -1, 1);
            }
            a.t() = rng.uniform(c, 12, -1, 1);
            b.t() = rng.uniform(c, 13, -1, 1);
            d.t() = rng.uniform(c, 14, -1, 1);
            EXPECT_LE(distance(m, a, d), distance(m, a, b) + distance(m, b, d) + 1e-9);
        }
}

TEST(Metrics, KoranyiInfinityRatioBounds)
{
    // ||p||_K^4 = |h|^4 + 16 t^2 and ||p||_inf^4 = max(|h|^4, 16 t^2); hence the
    // ratio lies in [1, 2^{1/4}] with both ends attained.
    const auto e = equivalence_constants(Metric::infinity(), Metric::koranyi(), 1, 20000, 9);
    EXPECT_GE(e.c_low, 1.0 - 1e-12);
    EXPECT_LE(e.c_high, std::pow(2.0, 0.25) + 1e-12);
    EXPECT_GT(e.c_high, 1.15);
    EXPECT_NEAR(koranyi_norm(p1(1, 0, 0.25)) / infinity_norm(p1(1, 0, 0.25)), std::pow(2.0, 0.25), 1e-15);
    EXPECT_DOUBLE_EQ(koranyi_norm(p1(0.6, 0.8, 0)) / infinity_norm(p1(0.6, 0.8, 0)), 1.0);
    EXPECT_DOUBLE_EQ(koranyi_norm(p1(0, 0, 0.3)) / infinity_norm(p1(0, 0, 0.3)), 1.0);
    const auto same = equivalence_constants(Metric::koranyi(), Metric::koranyi(), 2, 100, 1);
    EXPECT_DOUBLE_EQ(same.c_low, 1.0);
    EXPECT_DOUBLE_EQ(same.c_high, 1.0);
}

TEST(Metrics, CcHorizontalPointIsStraightLine)
{
    const CcResult r = cc_upper(p1(1, 0, 0));
    EXPECT_TRUE(r.certified);
    EXPECT_NEAR(r.value, 1.0, 1e-6);
    EXPECT_EQ(cc_upper(Point(1)).value, 0.0);
}

TEST(Metrics, CcVerticalPointNearIsoperimetricValue)
{
    // The geodesic to (0,0,1) is a circle of area 1, so d_cc = sqrt(4 pi).
    const CcResult r = cc_upper(p1(0, 0, 1));
    ASSERT_TRUE(r.certified);
    const double exact = std::sqrt(4 * std::numbers::pi);
    EXPECT_GE(r.value, exact * (1 - 1e-9));
    EXPECT_LE(r.value, exact * 1.01);
    const Point end = flow_horizontal(Point(1), r.control);
    EXPECT_LT(max_coord_diff(end, p1(0, 0, 1)), 1e-8);
}

TEST(Metrics, CcDominatesEquivalenceLowerBound)
{
    // d_cc >= d_K on H^1, and the inf/K ratio bound gives d_cc >= d_inf / 2^{1/4}.
    for (const Point& p : {p1(0, 0, 1), p1(0.5, -0.2, 0.3), p1(-1, 1, -0.7)}) {
        const double cc = cc_upper(p).value;
        EXPECT_GE(cc, infinity_norm(p) / std::pow(2.0, 0.25) - 1e-9);
    }
}

TEST(Metrics, CcVerticalPointMatchesRegularPolygon)
{
    // Among K-gons enclosing area 1 the regular one has the least perimeter,
    // sqrt(4 K tan(pi / K)).
    for (int K : {3, 4, 8}) {
        CcParams p;
        p.segments = K;
        const double want = std::sqrt(4.0 * K * std::tan(std::numbers::pi / K));
        EXPECT_NEAR(cc_upper(p1(0, 0, 1), p).value, want, 1e-5 * want) << K;
    }
}

TEST(Metrics, CcMonotoneInSegments)
{
    const Point p = p1(0.3, 0.1, 0.6);
    CcParams few;
    few.segments = 4;
    CcParams many = few;
    many.segments = 12;
    EXPECT_LE(cc_upper(p, many).value, cc_upper(p, few).value + 1e-12);
}

TEST(Metrics, ParseNames)
{
    EXPECT_EQ(Metric::parse("infinity").kind(), MetricKind::Infinity);
    EXPECT_EQ(Metric::parse("koranyi").kind(), MetricKind::Koranyi);
    EXPECT_EQ(Metric::parse("cc").kind(), MetricKind::CarnotCaratheodory);
    EXPECT_THROW(Metric::parse("euclid"), std::invalid_argument);
}
