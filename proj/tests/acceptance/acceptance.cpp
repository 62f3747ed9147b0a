// Acceptance checks, one line per criterion.

#include "hgraph/builtins.hpp"
#include "hgraph/config.hpp"
#include "hgraph/diff.hpp"
#include "hgraph/extension.hpp"
#include "hgraph/graph.hpp"
#include "hgraph/measure.hpp"
#include "hgraph/rng.hpp"
#include "hgraph/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace hgraph;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Criterion {
public:
    explicit Criterion(int id) : id_(id), start_(std::chrono::steady_clock::now()) {}

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass_ = false;
            failures_.push_back(what);
        }
    }

    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }

    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    bool finish()
    {
        std::ostringstream line;
        line << (pass_ ? "PASS" : "FAIL") << " criterion " << id_ << ": " << notes_;
        line << "; " << static_cast<int>(seconds() * 10) / 10.0 << " s";
        for (const auto& f : failures_)
            line << "\n    failed: " << f;
        std::printf("%s\n", line.str().c_str());
        std::fflush(stdout);
        return pass_;
    }

private:
    int id_;
    bool pass_ = true;
    std::string notes_;
    std::vector<std::string> failures_;
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Point random_point(const CounterRng& rng, std::uint64_t i, std::uint64_t lane0, int n, double half)
{
    double h[2 * kMaxN];
    for (int d = 0; d < 2 * n; ++d)
        h[d] = rng.uniform(i, lane0 + d, -half, half);
    return Point::from_horizontal({h, static_cast<std::size_t>(2 * n)}, rng.uniform(i, lane0 + 2 * n, -half, half));
}

Grid square(int dims, int count) { return Grid(std::vector<Axis>(dims, Axis{-1.0, 1.0, count})); }

FunctionSpec named(const std::string& name)
{
    FunctionSpec f;
    f.builtin = name;
    return f;
}

FunctionSpec linear(std::vector<std::vector<double>> m)
{
    FunctionSpec f;
    f.builtin = "intrinsic_linear";
    f.matrix = std::move(m);
    return f;
}

FunctionSpec constant(double c)
{
    FunctionSpec f;
    f.builtin = "constant";
    f.value = {c};
    return f;
}

FunctionSpec bump(double m, double s)
{
    FunctionSpec f;
    f.builtin = "bump_linear";
    f.matrix = {{m}};
    f.bump = s;
    return f;
}

FunctionSpec cone(double beta)
{
    FunctionSpec f;
    f.builtin = "cone_boundary";
    f.vertex = {0.3, -1.5, 0.2};
    f.beta = beta;
    return f;
}

FunctionSpec polynomial()
{
    FunctionSpec f;
    f.builtin = "polynomial";
    f.polynomial = {{{0.5, {1, 0}}, {0.25, {2, 0}}, {-0.3, {0, 1}}}};
    return f;
}

/// Parameters used for each registry entry at n = k = 1.
FunctionSpec default_spec(const std::string& name)
{
    if (name == "constant")
        return constant(0.7);
    if (name == "intrinsic_linear")
        return linear({{1.2}});
    if (name == "cone_boundary")
        return cone(1.0);
    if (name == "bump_linear")
        return bump(0.8, 0.3);
    if (name == "polynomial")
        return polynomial();
    return named(name);
}

SampledFunction sample(const Splitting& s, const Grid& g, const FunctionSpec& spec)
{
    return SampledFunction::sample(s, g, make_function(spec, s, Metric::infinity()));
}

std::vector<std::uint8_t> stride_mask(const Grid& g, int stride)
{
    std::vector<std::uint8_t> mask(g.size());
    std::vector<int> mi(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.multi_index(i, mi);
        mask[i] = std::all_of(mi.begin(), mi.end(), [stride](int v) { return v % stride == 0; });
    }
    return mask;
}

bool interior(const Grid& g, std::size_t i)
{
    std::vector<int> mi(g.dim());
    g.multi_index(i, mi);
    for (int a = 0; a < g.dim(); ++a)
        if (mi[a] == 0 || mi[a] == g.axes()[a].count - 1)
            return false;
    return true;
}

bool criterion1()
{
    Criterion c(1);
    const CounterRng rng(derive_seed(11, "acceptance.group"));
    const Metric inf = Metric::infinity(), kor = Metric::koranyi();
    const std::size_t S = 100000;
    double worst = 0.0;
    std::size_t tri_inf = 0, tri_kor = 0;
    for (int n : {1, 2, 3}) {
        const Point e(n);
        for (std::size_t i = 0; i < S; ++i) {
            const Point p = random_point(rng, i, 100 * n, n, 2.0);
            const Point q = random_point(rng, i, 100 * n + 20, n, 2.0);
            const Point r = random_point(rng, i, 100 * n + 40, n, 2.0);
            const double lambda = rng.uniform(i, 100 * n + 60, 0.1, 3.0);
            worst = std::max({worst, max_coord_diff((p * q) * r, p * (q * r)), max_coord_diff(p * e, p),
                              max_coord_diff(e * p, p), max_coord_diff(p * inverse(p), e),
                              max_coord_diff(inverse(p) * p, e),
                              max_coord_diff(dilate(lambda, p * q), dilate(lambda, p) * dilate(lambda, q))});
            tri_inf += distance(inf, p, r) > distance(inf, p, q) + distance(inf, q, r) + 1e-9;
            tri_kor += distance(kor, p, r) > distance(kor, p, q) + distance(kor, q, r) + 1e-9;
        }
    }
    c.require(worst < 1e-12, "axiom residual " + fmt(worst));
    c.require(tri_inf == 0, "d_inf triangle violations " + std::to_string(tri_inf));
    c.require(tri_kor == 0, "d_K triangle violations " + std::to_string(tri_kor));
    c.require(c.seconds() < 10.0, "runtime");
    c.note("axiom residual " + fmt(worst) + ", triangle violations " + std::to_string(tri_inf) + "/" +
           std::to_string(tri_kor) + " over 1e5 samples for n = 1, 2, 3");
    return c.finish();
}

const std::vector<std::pair<int, int>> kSplittings{{1, 1}, {2, 1}, {2, 2}};

bool criterion2()
{
    Criterion c(2);
    double worst = 0.0;
    std::size_t violations = 0;
    for (auto [n, k] : kSplittings) {
        const Splitting s = Splitting::standard(n, k);
        const ProjectionIdentityReport r = projection_identities_check(s, 100000, derive_seed(12, "acceptance"));
        worst = std::max({worst, r.pw_product, r.pv_product, r.pw_inverse, r.pv_inverse});
        for (const Metric& m : {Metric::infinity(), Metric::koranyi()})
            violations += norm_splitting_constant(s, m, 100000, derive_seed(13, "acceptance")).right_violations;
    }
    c.require(worst < 1e-10, "identity residual " + fmt(worst));
    c.require(violations == 0, "right inequality violations " + std::to_string(violations));
    c.note("identity residual " + fmt(worst) + ", right inequality violations " + std::to_string(violations));
    return c.finish();
}

bool criterion3()
{
    Criterion c(3);
    double worst = 0.0;
    for (auto [n, k] : kSplittings) {
        const Splitting s = Splitting::standard(n, k);
        worst = std::max(worst, projection_identities_check(s, 100000, derive_seed(14, "acceptance")).reconstruction);
    }
    c.require(worst < 1e-12, "reconstruction residual " + fmt(worst));
    c.note("reconstruction residual " + fmt(worst));
    return c.finish();
}

bool criterion4()
{
    Criterion c(4);
    const Splitting s = Splitting::standard(1, 1);
    const Metric inf = Metric::infinity();
    const Grid g = square(2, 129);
    std::string values;
    for (double m : {0.5, 1.0, 3.0}) {
        const LipschitzResult r = lipschitz_constant(sample(s, g, linear({{m}})), inf);
        c.require(r.constant >= 0.98 * m && r.constant <= 1.001 * m, "m = " + fmt(m) + " gives " + fmt(r.constant));
        values += fmt(r.constant) + " ";
    }
    const double linear_seconds = c.seconds();
    c.require(linear_seconds < 60.0, "runtime " + fmt(linear_seconds));
    const LipschitzResult k = lipschitz_constant(sample(s, g, constant(0.7)), inf);
    c.require(k.constant == 0.0 && !k.infinite, "constant gives " + fmt(k.constant));

    const std::vector<std::uint8_t> sub = stride_mask(g, 4);
    std::size_t mismatches = 0;
    for (const FunctionSpec& spec : {linear({{0.5}}), linear({{3.0}}), bump(0.8, 0.3), named("sqrt_cusp"), cone(1.0)}) {
        const SampledFunction f = sample(s, g, spec);
        const LipschitzResult a = lipschitz_constant(f, inf, sub, {true, 1});
        const LipschitzResult b = lipschitz_constant(f, inf, sub, {false, 1});
        mismatches += !(a.constant == b.constant && a.infinite == b.infinite && a.from == b.from && a.to == b.to);
    }
    c.require(mismatches == 0, "pruned and unpruned differ on " + std::to_string(mismatches) + " functions");
    c.note("constants " + values + "for m = 0.5 1 3 in " + fmt(linear_seconds) + " s, constant gives " +
           fmt(k.constant) + ", pruned/unpruned mismatches " + std::to_string(mismatches));
    return c.finish();
}

bool criterion5()
{
    Criterion c(5);
    const Splitting s = Splitting::standard(1, 1);
    const Metric inf = Metric::infinity();
    const int j_max = 16;
    const Grid g = square(2, 33);
    for (const FunctionSpec& spec : {named("zero"), constant(0.7), linear({{0.5}}), linear({{-2.0}})}) {
        const SampledFunction f = sample(s, g, spec);
        const LipReport rep = classify_stepanov(f, inf, j_max);
        std::size_t total = 0, labeled = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (interior(g, i)) {
                ++total;
                labeled += rep.labels[i] > 0;
            }
        c.require(labeled == total, spec.builtin + " labels " + std::to_string(labeled) + "/" + std::to_string(total));
    }

    // Spacing 1/256 in y; 1/64 in t.
    const Grid cusp_grid({Axis{-0.5, 0.5, 257}, Axis{-0.25, 0.25, 33}});
    const SampledFunction cusp = sample(s, cusp_grid, named("sqrt_cusp"));
    const LipReport rep = classify_stepanov(cusp, inf, j_max);
    const int origin = rep.labels[center_node(cusp_grid)];
    std::size_t far = 0, far_labeled = 0;
    for (std::size_t i = 0; i < cusp_grid.size(); ++i)
        if (std::abs(cusp_grid.coords(i)[0]) > 0.25) {
            ++far;
            far_labeled += rep.labels[i] > 0;
        }
    const double fraction = static_cast<double>(far_labeled) / static_cast<double>(far);
    c.require(origin == 0, "cusp origin label " + std::to_string(origin));
    c.require(fraction >= 0.95, "labeled fraction with |y| > 0.25 is " + fmt(fraction));
    c.note("zero/constant/linear fully labeled; sqrt_cusp at spacing 1/256: origin label " + std::to_string(origin) +
           ", labeled fraction for |y| > 0.25 " + fmt(fraction));
    return c.finish();
}

bool criterion6()
{
    Criterion c(6);
    const Metric inf = Metric::infinity();
    struct Case {
        int n, k, count;
        std::vector<std::vector<double>> m;
    };
    const std::vector<Case> cases{{1, 1, 33, {{0.7}}},
                                  {1, 1, 33, {{-2.5}}},
                                  {2, 1, 11, {{0.4, -1.1, 0.3}}},
                                  {2, 2, 17, {{0.5, -0.2}, {-0.2, 1.0}}}};
    double err = 0.0, res = 0.0;
    for (const Case& k : cases) {
        const Splitting s = Splitting::standard(k.n, k.k);
        const Grid g = square(s.w_dim(), k.count);
        const SampledFunction f = sample(s, g, linear(k.m));
        const DiffEstimate e = estimate_differential(f, inf, center_node(g));
        for (int r = 0; r < k.k; ++r)
            for (std::size_t j = 0; j < k.m[r].size(); ++j)
                err = std::max(err, std::abs(e.matrix(r, j) - k.m[r][j]));
        for (double v : e.residuals)
            res = std::max(res, v);
        c.require(e.verdict == Verdict::Consistent, "verdict " + std::string(verdict_name(e.verdict)));
    }
    c.require(err < 1e-9, "matrix error " + fmt(err));
    c.require(res < 1e-9, "residual " + fmt(res));

    const Splitting s = Splitting::standard(1, 1);
    const Grid g = square(2, 65);
    const DiffEstimate e = estimate_differential(sample(s, g, named("vertical_coordinate")), inf, center_node(g));
    const double m = std::abs(e.matrix(0, 0));
    c.require(m < 1e-9, "vertical_coordinate M = " + fmt(e.matrix(0, 0)));
    double worst = 0.0;
    for (std::size_t i = 0; i < e.radii.size(); ++i) {
        const double q = e.residuals[i] / (e.radii[i] / 4.0);
        worst = std::max(worst, q);
        c.require(q <= 1.1, "vertical_coordinate residual " + fmt(e.residuals[i]) + " at r = " + fmt(e.radii[i]));
    }
    c.note("linear matrix error " + fmt(err) + ", residual " + fmt(res) + "; vertical_coordinate |M| " + fmt(m) +
           ", max residual / (r/4) " + fmt(worst));
    return c.finish();
}

bool criterion7()
{
    Criterion c(7);
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    const std::vector<double> alphas{1.0, 0.5, 0.1};
    const Grid g = square(2, 33);
    std::size_t full = 0, total = 0;
    for (double m : {-0.8, 0.5, 2.0}) {
        const SampledFunction f = sample(s, g, linear({{m}}));
        const DiffEstimate e = estimate_differential(f, inf, center_node(g));
        for (const ConeRadius& r : verify_cone_characterization(f, inf, center_node(g), tangent_subgroup(e, s), alphas)) {
            ++total;
            full += r.full_grid;
            c.require(r.full_grid, "linear m = " + fmt(m) + " alpha = " + fmt(r.alpha) + " not full");
        }
    }

    const Grid fine({Axis{-0.5, 0.5, 257}, Axis{-0.25, 0.25, 33}});
    const SampledFunction cusp = sample(s, fine, named("sqrt_cusp"));
    const std::size_t o = center_node(fine);
    // Tangents: horizontal and the slope fitted at the smallest radius.
    std::string cusp_note;
    for (double m : {0.0, estimate_differential(cusp, inf, o).matrix(0, 0)}) {
        DiffEstimate e;
        e.matrix = Eigen::MatrixXd::Constant(1, 1, m);
        const auto radii = verify_cone_characterization(cusp, inf, o, tangent_subgroup(e, s), alphas);
        const bool none = !radii[2].radius && !radii[2].full_grid;
        c.require(none, "cusp alpha = 0.1 with M = " + fmt(m) + " has a radius");
        cusp_note += (cusp_note.empty() ? "" : ", ") + fmt(m) + " -> " + (none ? "none" : "radius");
    }
    c.note("linear full-grid radii " + std::to_string(full) + "/" + std::to_string(total) +
           "; sqrt_cusp alpha = 0.1 at spacing 1/256 by tangent slope: " + cusp_note);
    return c.finish();
}

bool criterion8()
{
    Criterion c(8);
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    const Grid g = square(2, 33);
    const std::size_t S = 100000;
    std::string bands;
    for (const BuiltinInfo& info : list_builtins()) {
        if (!info.intrinsic_lipschitz)
            continue;
        const SampledFunction f = sample(s, g, default_spec(info.name));
        const CounterRng rng(derive_seed(18, info.name));
        double quasi = 0.0, lo = kInf, hi = 0.0;
        for (std::size_t i = 0; i < S; ++i) {
            const std::vector<double> w1{rng.uniform(i, 0, -0.9, 0.9), rng.uniform(i, 1, -0.9, 0.9)};
            const std::vector<double> w2{rng.uniform(i, 2, -0.9, 0.9), rng.uniform(i, 3, -0.9, 0.9)};
            const std::vector<double> w3{rng.uniform(i, 4, -0.9, 0.9), rng.uniform(i, 5, -0.9, 0.9)};
            const double r12 = graph_quasidistance(f, inf, w1, w2);
            const double r13 = graph_quasidistance(f, inf, w1, w3);
            const double r32 = graph_quasidistance(f, inf, w3, w2);
            if (r13 + r32 > 0.0)
                quasi = std::max(quasi, r12 / (r13 + r32));
            if (r12 > 0.0) {
                const double d = distance(inf, f.graph_point(w1), f.graph_point(w2));
                lo = std::min(lo, d / r12);
                hi = std::max(hi, d / r12);
            }
        }
        c.require(std::isfinite(quasi), info.name + " quasi-triangle constant " + fmt(quasi));
        c.require(lo >= 1e-3 && hi <= 1e3, info.name + " d/rho band [" + fmt(lo) + ", " + fmt(hi) + "]");
        bands += (bands.empty() ? "" : ", ") + info.name + " K=" + fmt(quasi) + " d/rho [" + fmt(lo) + ", " + fmt(hi) + "]";
    }
    c.note(bands);
    return c.finish();
}

bool criterion9()
{
    Criterion c(9);
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    const Grid g = square(2, 17);
    const std::vector<std::uint8_t> e2 = stride_mask(g, 2);
    double agree = 0.0;
    for (const BuiltinInfo& info : list_builtins()) {
        const SampledFunction f = sample(s, g, default_spec(info.name));
        const double measured = lipschitz_constant(f, inf, e2).constant;
        const ExtensionResult r = mcshane_extend(f, e2, measured > 0.0 ? measured : 1.0, inf);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (e2[i])
                agree = std::max({agree, std::abs(r.upper.value(i)[0] - f.value(i)[0]),
                                  std::abs(r.lower.value(i)[0] - f.value(i)[0])});
        c.require(!r.upper_lip.infinite && std::isfinite(r.upper_lip.constant), info.name + " Lip(eta) infinite");
        c.require(!r.lower_lip.infinite && std::isfinite(r.lower_lip.constant), info.name + " Lip(psi) infinite");
    }
    c.require(agree <= 1e-12, "agreement on E " + fmt(agree));

    double full = 0.0;
    for (double m : {0.5, -1.5}) {
        const SampledFunction f = sample(s, g, linear({{m}}));
        const ExtensionResult r = mcshane_extend(f, std::vector<std::uint8_t>(g.size(), 1), std::abs(m), inf);
        for (std::size_t i = 0; i < g.size(); ++i)
            full = std::max({full, std::abs(r.upper.value(i)[0] - f.value(i)[0]),
                             std::abs(r.lower.value(i)[0] - f.value(i)[0])});
    }
    c.require(full <= 1e-12, "full-grid linear deviation " + fmt(full));

    std::size_t breaks = 0;
    const std::vector<std::vector<std::uint8_t>> chain{stride_mask(g, 8), stride_mask(g, 4), stride_mask(g, 2),
                                                       std::vector<std::uint8_t>(g.size(), 1)};
    for (const FunctionSpec& spec : {bump(0.8, 0.3), cone(1.0), named("sqrt_cusp"), named("vertical_coordinate")}) {
        const SampledFunction f = sample(s, g, spec);
        const double L = std::max(lipschitz_constant(f, inf).constant, 1e-3);
        std::vector<ExtensionResult> ext;
        for (const auto& e : chain)
            ext.push_back(mcshane_extend(f, e, L, inf));
        for (std::size_t a = 0; a + 1 < ext.size(); ++a)
            for (std::size_t i = 0; i < g.size(); ++i) {
                breaks += ext[a + 1].upper.value(i)[0] > ext[a].upper.value(i)[0] + 1e-12;
                breaks += ext[a + 1].lower.value(i)[0] < ext[a].lower.value(i)[0] - 1e-12;
            }
    }
    c.require(breaks == 0, "monotonicity breaks " + std::to_string(breaks));
    c.note("agreement on E " + fmt(agree) + ", full-grid linear deviation " + fmt(full) +
           ", Lip(eta) finite for all builtins, nested-chain breaks " + std::to_string(breaks));
    return c.finish();
}

bool criterion10()
{
    Criterion c(10);
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    const Grid g = square(2, 33);
    const SampledFunction zero = sample(s, g, named("zero"));
    MeasureOptions opt{1000000, derive_seed(20, "acceptance.measure"), 1};

    double worst_z = 0.0;
    for (double r : {0.05, 0.1, 0.2, 0.4}) {
        const MeasureEstimate e = pushforward_ball_measure(zero, inf, Point(1), r, opt);
        const double z = std::abs(e.estimate - r * r * r) / e.stderr_;
        worst_z = std::max(worst_z, z);
        c.require(z <= 3.0, "r = " + fmt(r) + " off by " + fmt(z) + " stderr");
    }
    const MeasureEstimate a = pushforward_ball_measure(zero, inf, Point(1), 0.2, opt);
    const MeasureEstimate b = pushforward_ball_measure(zero, inf, Point(1), 0.4, opt);
    const double ratio = b.estimate / a.estimate;
    const double sigma = ratio * std::hypot(a.stderr_ / a.estimate, b.stderr_ / b.estimate);
    c.require(std::abs(ratio - 8.0) <= 3 * sigma, "doubling ratio " + fmt(ratio));

    const std::vector<double> radii{0.05, 0.1, 0.2, 0.3, 0.5};
    std::string bands;
    for (const FunctionSpec& spec : {named("zero"), linear({{1.5}}), bump(0.8, 0.3), cone(1.0)}) {
        const SampledFunction f = sample(s, g, spec);
        const std::vector<double> origin{0.0, 0.0};
        const AhlforsProfile p = ahlfors_profile(f, inf, f.graph_point(origin), radii, opt);
        c.require(p.min_ratio > 0.0 && p.band() < 20.0, spec.builtin + " band " + fmt(p.band()));
        bands += (bands.empty() ? "" : ", ") + spec.builtin + " " + fmt(p.band());
    }
    c.require(c.seconds() < 120.0, "runtime");
    c.note("worst r^3 deviation " + fmt(worst_z) + " stderr, doubling " + fmt(ratio) + " +- " + fmt(sigma) +
           ", Ahlfors bands " + bands);
    return c.finish();
}

bool criterion11()
{
    Criterion c(11);
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    auto scalar = [&](const Grid& g, std::function<double(double, double)> phi) {
        return SampledFunction::sample(s, g, [phi](std::span<const double> w, std::span<double> out) {
            out[0] = phi(w[0], w[1]);
        });
    };
    auto vertex_over = [&](double y, double t, double v) {
        const double w[] = {y, t}, c0[] = {v};
        return s.embed_w(w) * s.embed_v(c0);
    };
    std::string notes;
    auto record = [&](const std::string& name, const SandwichRecord& r) {
        c.require(r.bracket_ok && r.middle_in_band && !r.violation,
                  name + ": gap " + fmt(r.bracket_gap) + ", band " + fmt(r.band) + ", offset " + fmt(r.middle_offset));
        notes += (notes.empty() ? "" : "; ") + name + " gap " + fmt(r.bracket_gap) + " band " + fmt(r.band);
    };

    for (double L : {0.5, 1.0}) {
        const Grid g({Axis{-0.5, 0.5, 33}, Axis{-0.5, 0.5, 33}});
        const ConeBoundaryFn up(s, vertex_over(-1, L, -L), 1 / L);
        const ConeBoundaryFn lo(s, vertex_over(1, L, L), 1 / L);
        const auto eta = scalar(g, [&](double y, double t) { const double w[] = {y, t}; return up.upper(inf, w); });
        const auto psi = scalar(g, [&](double y, double t) { const double w[] = {y, t}; return lo.lower(inf, w); });
        const auto phi = scalar(g, [L](double y, double) { return L * y; });
        record("pinched cones L = " + fmt(L), sandwich_harness(psi, phi, eta, inf, center_node(g)));
    }
    for (double m : {0.4, -1.0}) {
        const Grid g = square(2, 33);
        auto sq = [](double y, double t) { return y * y + 4 * std::abs(t); };
        const auto phi = scalar(g, [m](double y, double) { return m * y; });
        const auto eta = scalar(g, [&](double y, double t) { return m * y + 0.2 * sq(y, t); });
        const auto psi = scalar(g, [&](double y, double t) { return m * y - 0.2 * sq(y, t); });
        record("bump m = " + fmt(m), sandwich_harness(psi, phi, eta, inf, center_node(g)));
    }
    c.note(notes);
    return c.finish();
}

bool criterion12()
{
    Criterion c(12);
    RunConfig config;
    config.seed = 7;
    std::vector<std::string> reports;
    for (unsigned threads : {1u, 1u, 2u, 4u}) {
        config.threads = threads;
        reports.push_back(run_verify_suite(config).to_json(config.seed).dump(2));
    }
    std::size_t differing = 0;
    for (const auto& r : reports)
        differing += r != reports.front();
    c.require(differing == 0, std::to_string(differing) + " reports differ");
    c.note("verify reports at threads 1, 1, 2, 4: " + std::to_string(differing) + " differ from the first (" +
           std::to_string(reports.front().size()) + " bytes)");
    return c.finish();
}

}  // namespace

int main()
{
    const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3,  criterion4,
                                                      criterion5, criterion6, criterion7,  criterion8,
                                                      criterion9, criterion10, criterion11, criterion12};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            failed += !criteria[i]();
        } catch (const std::exception& e) {
            std::printf("FAIL criterion %zu: exception %s\n", i + 1, e.what());
            ++failed;
        }
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
