#include "hgraph/splitting.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hgraph;

namespace {

Point p1(double x, double y, double t)
{
    const double xs[] = {x}, ys[] = {y};
    return Point(xs, ys, t);
}

}  // namespace

TEST(Splitting, StandardProjectionHandValue)
{
    const Splitting s = Splitting::standard(1, 1);
    const Components c = s.project(p1(1, 2, 3));
    // w = p . v^{-1} = (1,2,3)(-1,0,0) = (0, 2, 3 + 1) and v = (1,0,0).
    EXPECT_EQ(c.w, p1(0, 2, 4));
    EXPECT_EQ(c.v, p1(1, 0, 0));
    EXPECT_EQ(c.w * c.v, p1(1, 2, 3));
    EXPECT_EQ(s.w_coords(c.w), (std::vector<double>{2, 4}));
}

TEST(Splitting, ComponentsOfSubgroupElements)
{
    const Splitting s = Splitting::standard(1, 1);
    const Components in_v = s.project(p1(0.7, 0, 0));
    EXPECT_EQ(in_v.w, Point(1));
    EXPECT_EQ(in_v.v, p1(0.7, 0, 0));
    const Components in_w = s.project(p1(0, -0.4, 0.9));
    EXPECT_EQ(in_w.w, p1(0, -0.4, 0.9));
    EXPECT_EQ(in_w.v, Point(1));
}

TEST(Splitting, StandardOrderingForLargerN)
{
    const Splitting s = Splitting::standard(2, 1);
    EXPECT_EQ(s.w_dim(), 4);
    const double w[] = {1.0, 2.0, 3.0, 4.0};  // x2, y1, y2, t
    const Point p = s.embed_w(w);
    EXPECT_EQ(p.x(0), 0.0);
    EXPECT_EQ(p.x(1), 1.0);
    EXPECT_EQ(p.y(0), 2.0);
    EXPECT_EQ(p.y(1), 3.0);
    EXPECT_EQ(p.t(), 4.0);
    EXPECT_TRUE(s.is_standard());
}

TEST(Splitting, RejectsNonIsotropicFrame)
{
    // X_1 and Y_1 do not commute.
    const Frame bad{{1, 0}, {0, 1}};
    EXPECT_THROW(Splitting::from_frames(1, bad), std::invalid_argument);
}

TEST(Splitting, RotatedFrameRoundTrip)
{
    const double c = std::cos(0.3), s_ = std::sin(0.3);
    const Splitting s = Splitting::from_frames(1, Frame{{c, s_}});
    EXPECT_FALSE(s.is_standard());
    const Point p = p1(0.4, -1.2, 0.8);
    const Components comp = s.project(p);
    EXPECT_LT(max_coord_diff(comp.w * comp.v, p), 1e-12);
    const Components vw = s.project_vw(p);
    EXPECT_LT(max_coord_diff(vw.v * vw.w, p), 1e-12);
}

TEST(Splitting, ProjectionIdentities)
{
    for (auto [n, k] : {std::pair{1, 1}, {2, 1}, {2, 2}}) {
        const Splitting s = Splitting::standard(n, k);
        EXPECT_LT(projection_identities_check(s, 5000, 17).max_residual(), 1e-10) << n << "," << k;
        EXPECT_EQ(projection_identities_at(s, Point(n), Point(n)).max_residual(), 0.0);
    }
}

TEST(Splitting, ConeMembershipHandValue)
{
    const Splitting s = Splitting::standard(1, 1);
    // q_W = (0, 0.1, 0.05), ||q_W|| = max(0.1, 2 sqrt(0.05)) ~ 0.447 <= 0.5.
    const Cone c{s, Point(1), 0.5, ConeBase::W};
    EXPECT_TRUE(cone_contains(Metric::infinity(), c, p1(1, 0.1, 0)));
    const Cone zero{s, Point(1), 0.0, ConeBase::W};
    EXPECT_TRUE(cone_contains(Metric::infinity(), zero, p1(2, 0, 0)));
    for (double beta : {0.0, 1.0, 100.0}) {
        const Cone w{s, Point(1), beta, ConeBase::W};
        EXPECT_FALSE(cone_contains(Metric::infinity(), w, p1(0, 0.3, 0.1)));
    }
    const Cone narrow{s, Point(1), 0.4, ConeBase::W};
    EXPECT_FALSE(cone_contains(Metric::infinity(), narrow, p1(1, 0.1, 0)));
}

TEST(Splitting, ConeIsLeftTranslated)
{
    const Splitting s = Splitting::standard(1, 1);
    const Point vertex = p1(0.3, -0.2, 0.7);
    const Cone c{s, vertex, 0.5, ConeBase::W};
    EXPECT_TRUE(cone_contains(Metric::infinity(), c, vertex * p1(1, 0.1, 0)));
    EXPECT_FALSE(cone_contains(Metric::infinity(), c, vertex * p1(0, 0.1, 0)));
}

TEST(Splitting, NormSplittingConstant)
{
    const auto r = norm_splitting_constant(Splitting::standard(1, 1), Metric::infinity(), 20000, 3);
    EXPECT_GT(r.c_tilde, 0.0);
    EXPECT_LE(r.c_tilde, 1.0);
    EXPECT_EQ(r.right_violations, 0u);
}
