#include "hgraph/diff.hpp"

#include "hgraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hgraph {

namespace {

void check_shape(const Splitting& s, const Eigen::MatrixXd& m)
{
    if (m.rows() != s.k() || m.cols() != s.w_horizontal_dim())
        throw std::invalid_argument("intrinsic linear matrix must be k x (2n - k), got " + std::to_string(m.rows()) +
                                    " x " + std::to_string(m.cols()));
    if (!m.allFinite())
        throw std::invalid_argument("intrinsic linear matrix has non-finite entries");
}

void apply_matrix(const Eigen::MatrixXd& m, std::span<const double> w, std::span<double> out)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            s += m(r, c) * w[c];
        out[r] = s;
    }
}

Point random_point(const CounterRng& rng, std::uint64_t counter, int n, double scale)
{
    double h[2 * kMaxN];
    for (int d = 0; d < 2 * n; ++d)
        h[d] = rng.uniform(counter, d, -scale, scale);
    return Point::from_horizontal({h, static_cast<std::size_t>(2 * n)}, rng.uniform(counter, 2 * n, -scale, scale));
}

}  // namespace

IntrinsicLinearMap::IntrinsicLinearMap(Splitting s, Eigen::MatrixXd m) : splitting(std::move(s)), matrix(std::move(m))
{
    check_shape(splitting, matrix);
}

std::vector<double> IntrinsicLinearMap::apply(std::span<const double> w) const
{
    if (static_cast<int>(w.size()) != splitting.w_dim() && static_cast<int>(w.size()) != splitting.w_horizontal_dim())
        throw std::invalid_argument("linear_apply expects W coordinates");
    std::vector<double> out(splitting.k());
    apply_matrix(matrix, w, out);
    return out;
}

Point IntrinsicLinearMap::graph_point(std::span<const double> w) const
{
    return multiply(splitting.embed_w(w), splitting.embed_v(apply(w)));
}

std::vector<double> linear_apply(const IntrinsicLinearMap& map, std::span<const double> w)
{
    return map.apply(w);
}

double linear_closure_residual(const IntrinsicLinearMap& map, std::size_t samples, std::uint64_t seed)
{
    const TangentSubgroup t(map.splitting, map.matrix);
    const CounterRng rng(seed, 0x6c63);
    const int wd = map.splitting.w_dim();
    std::vector<double> a(wd), b(wd);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        for (int d = 0; d < wd; ++d) {
            a[d] = rng.uniform(i, d, -3.0, 3.0);
            b[d] = rng.uniform(i, wd + d, -3.0, 3.0);
        }
        const Point p = map.graph_point(a);
        const Point q = map.graph_point(b);
        const double lambda = rng.uniform(i, 2 * wd, 0.1, 4.0);
        worst = std::max({worst, t.defect(multiply(p, q)), t.defect(dilate(lambda, p)), t.defect(inverse(p))});
    }
    return worst;
}

const char* verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::Consistent:
        return "consistent";
    case Verdict::Fails:
        return "fails";
    case Verdict::Inconclusive:
        break;
    }
    return "inconclusive";
}

std::vector<double> default_radii(const SampledFunction& f)
{
    const Grid g = f.grid().centered();
    double half = std::numeric_limits<double>::infinity();
    for (int a = 0; a + 1 < g.dim(); ++a)
        half = std::min(half, g.axes()[a].max);
    const double floor = profile_floor_radius(f);
    std::vector<double> radii{0.5 * half, 0.25 * half};
    while (radii.size() < 4 && radii.back() / 2 >= floor)
        radii.push_back(radii.back() / 2);
    return radii;
}

DiffEstimate fit_at_origin(const SampledFunction& g, const Metric& metric, const DiffOptions& options)
{
    if (g.orientation() != Orientation::WtoV)
        throw std::invalid_argument("differential estimation needs a W -> V function");
    const Splitting& s = g.splitting();
    const int k = s.k();
    const int h = s.w_horizontal_dim();
    const int wd = s.w_dim();
    const Grid& grid = g.grid();
    const std::size_t center = center_node(grid);

    DiffEstimate e;
    e.base.assign(wd, 0.0);
    e.radii = options.radii.empty() ? default_radii(g) : options.radii;
    if (e.radii.empty())
        throw std::invalid_argument("radius schedule is empty");
    for (std::size_t i = 0; i < e.radii.size(); ++i) {
        if (!(e.radii[i] > 0.0) || !std::isfinite(e.radii[i]))
            throw std::invalid_argument("radii must be positive");
        if (i > 0 && !(e.radii[i] < e.radii[i - 1]))
            throw std::invalid_argument("radii must be strictly decreasing");
    }
    if (!(options.tol > 0.0) || !(options.decay >= 1.0))
        throw std::invalid_argument("verdict thresholds need tol > 0 and decay >= 1");

    const double rmax = e.radii.front();
    for (int a = 0; a < wd; ++a) {
        const Axis& ax = grid.axes()[a];
        const double need = (a + 1 < wd ? rmax : rmax * rmax / 4.0) + 2.0 * ax.step();
        if (ax.max < need)
            throw std::domain_error("largest radius leaves less than two grid cells of margin on axis " +
                                    std::to_string(a));
    }

    // Ball members: coordinates, norm, value.
    struct Node {
        std::vector<double> w;
        double norm;
        std::vector<double> v;
    };
    std::vector<Node> nodes;
    std::vector<double> x(wd);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i == center)
            continue;
        grid.coords(i, x);
        const double nw = norm(metric, s.embed_w(x));
        if (!(nw < rmax))
            continue;
        if (!g.active(i))
            throw std::domain_error("a node inside the largest ball is outside the active domain");
        const auto v = g.value(i);
        nodes.push_back({x, nw, std::vector<double>(v.begin(), v.end())});
    }

    bool rank_ok = true;
    for (double r : e.radii) {
        std::vector<const Node*> ball;
        for (const Node& nd : nodes)
            if (nd.norm < r)
                ball.push_back(&nd);
        e.ball_sizes.push_back(ball.size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, h);
        double res = std::numeric_limits<double>::infinity();
        if (static_cast<int>(ball.size()) < h) {
            rank_ok = false;
            e.diagnostic = "too few nodes in the ball of radius " + std::to_string(r);
        } else {
            Eigen::MatrixXd X(ball.size(), h);
            Eigen::MatrixXd Y(ball.size(), k);
            for (std::size_t row = 0; row < ball.size(); ++row) {
                const double inv = 1.0 / ball[row]->norm;
                for (int c = 0; c < h; ++c)
                    X(row, c) = ball[row]->w[c] * inv;
                for (int c = 0; c < k; ++c)
                    Y(row, c) = ball[row]->v[c] * inv;
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
            qr.setThreshold(1e-10);
            if (qr.rank() < h) {
                rank_ok = false;
                e.diagnostic = "rank-deficient fit at radius " + std::to_string(r);
            } else {
                m = qr.solve(Y).transpose();
                res = 0.0;
                double fit[kMaxN];
                for (const Node* nd : ball) {
                    apply_matrix(m, nd->w, {fit, static_cast<std::size_t>(k)});
                    double s2 = 0.0;
                    for (int c = 0; c < k; ++c)
                        s2 += (nd->v[c] - fit[c]) * (nd->v[c] - fit[c]);
                    // Horizontal V-increments have norm equal to their Euclidean length.
                    res = std::max(res, std::sqrt(s2) / nd->norm);
                }
            }
        }
        e.fits.push_back(m);
        e.residuals.push_back(res);
    }
    e.matrix = e.fits.back();

    if (!rank_ok) {
        e.verdict = Verdict::Inconclusive;
        return e;
    }
    const double first = e.residuals.front();
    const double last = e.residuals.back();
    const bool exact = *std::max_element(e.residuals.begin(), e.residuals.end()) <= kExactResidual;
    bool nondecreasing = true;
    bool all_above = true;
    for (std::size_t i = 0; i < e.residuals.size(); ++i) {
        if (i > 0 && e.residuals[i] < e.residuals[i - 1])
            nondecreasing = false;
        if (!(e.residuals[i] > options.tol))
            all_above = false;
    }
    if (exact || (last < options.tol && first >= options.decay * last))
        e.verdict = Verdict::Consistent;
    else if (nondecreasing && all_above)
        e.verdict = Verdict::Fails;
    else
        e.verdict = Verdict::Inconclusive;
    return e;
}

DiffEstimate estimate_differential(const SampledFunction& f, const Metric& metric, std::span<const double> wbar,
                                   const DiffOptions& options)
{
    const TranslatedFunction t = translate_function(f, wbar);
    DiffEstimate e = fit_at_origin(t.function, metric, options);
    e.base.assign(wbar.begin(), wbar.end());
    e.interpolation_error = t.interpolation_error;
    return e;
}

DiffEstimate estimate_differential(const SampledFunction& f, const Metric& metric, std::size_t base_node,
                                   const DiffOptions& options)
{
    if (base_node >= f.size() || !f.active(base_node))
        throw std::out_of_range("base node is not in the active domain");
    const auto w = f.grid().coords(base_node);
    return estimate_differential(f, metric, w, options);
}

TangentSubgroup::TangentSubgroup(Splitting s, Eigen::MatrixXd m) : splitting_(std::move(s)), matrix_(std::move(m))
{
    check_shape(splitting_, matrix_);
}

Point TangentSubgroup::element(std::span<const double> w) const
{
    double v[kMaxN];
    apply_matrix(matrix_, w, {v, static_cast<std::size_t>(splitting_.k())});
    return multiply(splitting_.embed_w(w), splitting_.embed_v({v, static_cast<std::size_t>(splitting_.k())}));
}

Components TangentSubgroup::decompose(const Point& p) const
{
    const int k = splitting_.k();
    const Components c = splitting_.project(p);
    double wc[2 * kMaxN + 1];
    splitting_.w_coords(c.w, {wc, static_cast<std::size_t>(splitting_.w_dim())});
    double m[kMaxN], pv[kMaxN];
    apply_matrix(matrix_, {wc, static_cast<std::size_t>(splitting_.w_dim())}, {m, static_cast<std::size_t>(k)});
    splitting_.v_coords(c.v, {pv, static_cast<std::size_t>(k)});
    for (int d = 0; d < k; ++d)
        pv[d] -= m[d];
    const Point tau = multiply(c.w, splitting_.embed_v({m, static_cast<std::size_t>(k)}));
    return {tau, splitting_.embed_v({pv, static_cast<std::size_t>(k)})};
}

double TangentSubgroup::defect(const Point& p) const
{
    return decompose(p).v.horizontal_norm();
}

TangentSubgroup tangent_subgroup(const DiffEstimate& e, const Splitting& s, std::uint64_t seed)
{
    if (e.verdict == Verdict::Fails)
        throw std::invalid_argument("no tangent subgroup for a failed differential estimate");
    TangentSubgroup t(s, e.matrix);
    const CounterRng rng(seed, 0x7473);
    const int wd = s.w_dim();
    std::vector<double> a(wd), b(wd);
    for (std::uint64_t i = 0; i < 64; ++i) {
        for (int d = 0; d < wd; ++d) {
            a[d] = rng.uniform(i, d, -2.0, 2.0);
            b[d] = rng.uniform(i, wd + d, -2.0, 2.0);
        }
        const Point p = t.element(a);
        const Point q = t.element(b);
        const double scale = 1.0 + e.matrix.norm();
        if (t.defect(multiply(p, q)) > 1e-10 * scale * 16.0 || t.defect(dilate(0.37, p)) > 1e-10 * scale)
            throw std::runtime_error("tangent subgroup is not closed under products and dilations");
        const Point z = random_point(rng, 1000 + i, s.n(), 2.0);
        const Components c = t.decompose(z);
        if (max_coord_diff(multiply(c.w, c.v), z) > 1e-10 * scale * 16.0 || t.defect(c.w) > 1e-10 * scale)
            throw std::runtime_error("tangent subgroup is not complementary to V");
    }
    return t;
}

std::vector<ConeRadius> verify_cone_characterization(const SampledFunction& f, const Metric& metric,
                                                     std::size_t base_node, const TangentSubgroup& t,
                                                     std::span<const double> alphas)
{
    if (f.orientation() != Orientation::WtoV)
        throw std::invalid_argument("cone characterization needs a W -> V function");
    if (!(t.splitting() == f.splitting()))
        throw std::invalid_argument("tangent subgroup and function use different splittings");
    if (base_node >= f.size() || !f.active(base_node))
        throw std::out_of_range("base node is not in the active domain");
    for (double a : alphas)
        if (!(a > 0.0))
            throw std::invalid_argument("cone openings must be positive");

    const Point pinv = inverse(f.graph_point(base_node));
    const Point winv = inverse(f.domain_point(base_node));
    struct Entry {
        double d, tnorm, vnorm;
    };
    std::vector<Entry> entries;
    double nearest = std::numeric_limits<double>::infinity();
    double farthest = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (j == base_node || !f.active(j))
            continue;
        const double d = norm(metric, multiply(winv, f.domain_point(j)));
        const Components c = t.decompose(multiply(pinv, f.graph_point(j)));
        entries.push_back({d, norm(metric, c.w), norm(metric, c.v)});
        nearest = std::min(nearest, d);
        farthest = std::max(farthest, d);
    }
    std::vector<ConeRadius> out;
    for (double alpha : alphas) {
        double r = std::numeric_limits<double>::infinity();
        for (const Entry& en : entries)
            if (in_closed_cone(en.tnorm, en.vnorm, alpha))
                r = std::min(r, en.d);
        ConeRadius cr;
        cr.alpha = alpha;
        if (std::isinf(r)) {
            cr.full_grid = true;
            cr.radius = farthest;
        } else if (r > nearest) {
            cr.radius = r;
        }
        out.push_back(cr);
    }
    return out;
}

std::optional<Point> pansu_quotient(const SampledFunction& g, std::span<const double> vbar, std::span<const double> v,
                                    double lambda)
{
    if (g.orientation() != Orientation::VtoW)
        throw std::invalid_argument("Pansu quotients need a V -> W function");
    if (!(lambda > 0.0))
        throw std::invalid_argument("lambda must be positive");
    const int k = g.splitting().k();
    if (static_cast<int>(vbar.size()) != k || static_cast<int>(v.size()) != k)
        throw std::invalid_argument("Pansu quotient points need k coordinates");
    std::vector<double> moved(k), val(g.value_dim());
    for (int d = 0; d < k; ++d)
        moved[d] = vbar[d] + lambda * v[d];
    if (!g.evaluate(vbar, val))
        return std::nullopt;
    const Point p = multiply(g.embed_domain(vbar), g.embed_value(val));
    if (!g.evaluate(moved, val))
        return std::nullopt;
    const Point q = multiply(g.embed_domain(moved), g.embed_value(val));
    return dilate(1.0 / lambda, multiply(inverse(p), q));
}

PansuSchedule pansu_schedule(const SampledFunction& g, std::span<const double> vbar, std::span<const double> v,
                             std::span<const double> lambdas)
{
    PansuSchedule s;
    s.lambdas.assign(lambdas.begin(), lambdas.end());
    const Point* prev = nullptr;
    for (double l : lambdas)
        s.quotients.push_back(pansu_quotient(g, vbar, v, l));
    for (const auto& q : s.quotients) {
        if (!q)
            continue;
        if (prev) {
            s.final_gap = max_coord_diff(*prev, *q);
            s.max_gap = std::max(s.max_gap, s.final_gap);
        }
        prev = &*q;
    }
    return s;
}

}  // namespace hgraph
