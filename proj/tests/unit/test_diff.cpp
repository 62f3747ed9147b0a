#include "common.hpp"

#include "hgraph/diff.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hgraph;
using namespace testutil;

TEST(Diff, LinearApplyValues)
{
    const Splitting s = Splitting::standard(1, 1);
    const double w[] = {2.0, 5.0};
    Eigen::MatrixXd m(1, 1);
    m << -1.3;
    EXPECT_DOUBLE_EQ(linear_apply(IntrinsicLinearMap(s, m), w)[0], 2 * -1.3);
    EXPECT_EQ(linear_apply(IntrinsicLinearMap(s, Eigen::MatrixXd::Zero(1, 1)), w)[0], 0.0);
    EXPECT_THROW(IntrinsicLinearMap(s, Eigen::MatrixXd::Zero(1, 2)), std::invalid_argument);
}

TEST(Diff, LinearGraphIsSubgroup)
{
    // (m y, y, t - m y^2/2) (m y', y', t' - m y'^2/2) = graph point over (y + y', t + t' + m y y').
    const Splitting s = Splitting::standard(1, 1);
    Eigen::MatrixXd m(1, 1);
    m << 0.9;
    const IntrinsicLinearMap map(s, m);
    const double a[] = {0.3, -0.4}, b[] = {-1.1, 0.7}, ab[] = {0.3 - 1.1, -0.4 + 0.7 + 0.9 * 0.3 * -1.1};
    EXPECT_LT(max_coord_diff(map.graph_point(a) * map.graph_point(b), map.graph_point(ab)), 1e-15);
    for (int n : {1, 2, 3})
        for (int k = 1; k <= n; ++k) {
            const Splitting sk = Splitting::standard(n, k);
            Eigen::MatrixXd mk = Eigen::MatrixXd::Random(k, 2 * n - k);
            EXPECT_LT(linear_closure_residual(IntrinsicLinearMap(sk, mk), 500, 3), 1e-10) << n << "," << k;
        }
}

TEST(Diff, ExactOnLinearDataH1)
{
    const Grid g = grid2(33, 33);
    for (double m : {0.0, 0.6, -2.0}) {
        const auto f = scalar_h1(g, [m](double y, double) { return m * y; });
        for (std::size_t base : {*g.nearest(std::vector<double>{0.0, 0.0}), *g.nearest(std::vector<double>{0.125, -0.25})}) {
            const DiffEstimate e = estimate_differential(f, Metric::infinity(), base);
            EXPECT_NEAR(e.matrix(0, 0), m, 1e-9);
            for (double r : e.residuals)
                EXPECT_LT(r, 1e-9);
            EXPECT_EQ(e.verdict, Verdict::Consistent);
        }
    }
}

TEST(Diff, ExactOnLinearDataH2)
{
    const Splitting s = Splitting::standard(2, 1);
    const Axis a{-1, 1, 11};
    const Grid g({a, a, a, a});
    Eigen::MatrixXd m(1, 3);
    m << 0.5, -1.0, 2.0;
    const IntrinsicLinearMap map(s, m);
    const auto f = SampledFunction::sample(s, g, [&](std::span<const double> w, std::span<double> out) {
        out[0] = map.apply(w)[0];
    });
    DiffOptions opt;
    opt.radii = {0.5, 0.3};
    const DiffEstimate e = estimate_differential(f, Metric::infinity(), *g.nearest(std::vector<double>(4, 0.0)), opt);
    EXPECT_LT((e.matrix - m).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(e.verdict, Verdict::Consistent);
}

TEST(Diff, ConstantHasZeroDifferential)
{
    const Grid g = grid2(33, 33);
    const auto f = scalar_h1(g, [](double, double) { return 1.25; });
    const DiffEstimate e = estimate_differential(f, Metric::infinity(), *g.nearest(std::vector<double>{-0.25, 0.125}));
    EXPECT_NEAR(e.matrix(0, 0), 0.0, 1e-12);
    EXPECT_EQ(e.verdict, Verdict::Consistent);
}

TEST(Diff, VerticalCoordinateResidualBound)
{
    // |t| / max(|y|, 2 sqrt|t|) <= sqrt|t| / 2 <= r / 4 on the ball of radius r.
    const Grid g = grid2(65, 65);
    const auto f = scalar_h1(g, [](double, double t) { return t; });
    const DiffEstimate e = estimate_differential(f, Metric::infinity(), center_node(g));
    EXPECT_NEAR(e.matrix(0, 0), 0.0, 1e-12);
    for (std::size_t i = 0; i < e.radii.size(); ++i)
        EXPECT_LE(e.residuals[i], e.radii[i] / 4 * 1.1);
    EXPECT_EQ(e.verdict, Verdict::Consistent);
}

TEST(Diff, CuspFails)
{
    const Grid g = grid2(65, 65);
    const auto f = scalar_h1(g, [](double y, double) { return std::sqrt(std::abs(y)); });
    EXPECT_EQ(estimate_differential(f, Metric::infinity(), center_node(g)).verdict, Verdict::Fails);
}

TEST(Diff, MarginTooSmallThrows)
{
    const Grid g = grid2(33, 33);
    const auto f = scalar_h1(g, [](double y, double) { return y; });
    DiffOptions opt;
    opt.radii = {0.5};
    EXPECT_THROW(estimate_differential(f, Metric::infinity(), *g.nearest(std::vector<double>{0.75, 0.0}), opt),
                 std::domain_error);
}

TEST(Diff, TranslationInvarianceNearestBitwise)
{
    const Grid g = grid2(33, 33);
    const auto f = scalar_h1(g, [](double y, double t) { return 0.4 * y + 0.3 * y * y - 0.2 * t; },
                             Interpolation::Nearest);
    const std::size_t base = *g.nearest(std::vector<double>{0.125, 0.0625});
    const DiffEstimate direct = estimate_differential(f, Metric::infinity(), base);
    const auto tr = translate_function(f, base);
    const DiffEstimate again = estimate_differential(tr.function, Metric::infinity(), center_node(tr.function.grid()));
    ASSERT_EQ(direct.residuals.size(), again.residuals.size());
    EXPECT_EQ(direct.matrix(0, 0), again.matrix(0, 0));
    for (std::size_t i = 0; i < direct.residuals.size(); ++i)
        EXPECT_EQ(direct.residuals[i], again.residuals[i]);
    EXPECT_EQ(direct.verdict, again.verdict);
}

TEST(Diff, TangentSubgroupBasics)
{
    const Splitting s = Splitting::standard(1, 1);
    DiffEstimate zero;
    zero.matrix = Eigen::MatrixXd::Zero(1, 1);
    const TangentSubgroup w = tangent_subgroup(zero, s);
    const double c[] = {0.4, -0.3};
    EXPECT_EQ(w.element(c), s.embed_w(c));

    DiffEstimate lin;
    lin.matrix = Eigen::MatrixXd::Constant(1, 1, 1.5);
    const TangentSubgroup t = tangent_subgroup(lin, s);
    const IntrinsicLinearMap map(s, lin.matrix);
    for (double y : {-0.7, 0.2, 1.3}) {
        const double w2[] = {y, 0.35};
        EXPECT_LT(t.defect(map.graph_point(w2)), 1e-12);
        EXPECT_LT(t.defect(dilate(3.0, t.element(w2))), 1e-10);
    }
    // Right multiplication by V leaves the T-component alone.
    const Point p = p1(0.3, -0.8, 0.45);
    const Point q = p * p1(-1.7, 0, 0);
    EXPECT_LT(max_coord_diff(t.decompose(p).w, t.decompose(q).w), 1e-10);
}

TEST(Diff, ConeCharacterizationLinearAndCusp)
{
    const Metric inf = Metric::infinity();
    const std::vector<double> alphas{1.0, 0.5, 0.1};
    const Grid g = grid2(33, 33);
    const auto lin = scalar_h1(g, [](double y, double) { return -0.8 * y; });
    const DiffEstimate e = estimate_differential(lin, inf, center_node(g));
    for (const ConeRadius& c : verify_cone_characterization(lin, inf, center_node(g), tangent_subgroup(e, lin.splitting()), alphas))
        EXPECT_TRUE(c.full_grid) << c.alpha;

    const Grid fine = grid2(257, 33, 0.5, 0.25);
    const auto cusp = scalar_h1(fine, [](double y, double) { return std::sqrt(std::abs(y)); });
    for (double slope : {0.0, 0.5}) {
        DiffEstimate any;
        any.matrix = Eigen::MatrixXd::Constant(1, 1, slope);
        const auto radii =
            verify_cone_characterization(cusp, inf, center_node(fine), tangent_subgroup(any, cusp.splitting()), alphas);
        EXPECT_FALSE(radii[2].radius.has_value());
        EXPECT_FALSE(radii[2].full_grid);
    }
}

TEST(Diff, VerticalCoordinateConeRadiiShrinkButStayPositive)
{
    const Metric inf = Metric::infinity();
    const Grid g = grid2(65, 65);
    const auto f = scalar_h1(g, [](double, double t) { return t; });
    DiffEstimate zero;
    zero.matrix = Eigen::MatrixXd::Zero(1, 1);
    const auto radii = verify_cone_characterization(f, inf, center_node(g), tangent_subgroup(zero, f.splitting()),
                                                    std::vector<double>{1.0, 0.5, 0.1});
    double prev = std::numeric_limits<double>::infinity();
    for (const ConeRadius& c : radii) {
        const double r = c.full_grid ? std::numeric_limits<double>::infinity() : c.radius.value_or(0.0);
        EXPECT_GT(r, 0.0) << c.alpha;
        EXPECT_LE(r, prev);
        prev = r;
    }
}

TEST(Diff, PansuQuotients)
{
    const Splitting s = Splitting::standard(1, 1);
    const Grid g({Axis{-1, 1, 65}});
    const auto zero = SampledFunction::sample(
        s, g, [](std::span<const double>, std::span<double> out) { out[0] = out[1] = 0.0; },
        Interpolation::Multilinear, Orientation::VtoW);
    const double vbar[] = {0.0}, v[] = {0.5};
    for (double lambda : {1.0, 0.5, 0.25}) {
        const auto q = pansu_quotient(zero, vbar, v, lambda);
        ASSERT_TRUE(q.has_value());
        EXPECT_LT(max_coord_diff(*q, p1(0.5, 0, 0)), 1e-15);
    }
    // V -> W linear map v -> (0, a v, 0): Phi(v) = (v, a v, a v^2 / 2) is a subgroup.
    const double a = 0.7;
    const auto lin = SampledFunction::sample(
        s, g,
        [a](std::span<const double> x, std::span<double> out) {
            out[0] = a * x[0];
            out[1] = 0.0;
        },
        Interpolation::Multilinear, Orientation::VtoW);
    const std::vector<double> lambdas{1.0, 0.5, 0.25, 0.125};
    const auto sched = pansu_schedule(lin, vbar, v, lambdas);
    EXPECT_LT(sched.max_gap, 1e-9);
}
