#include "hgraph/verify.hpp"

#include "hgraph/diff.hpp"
#include "hgraph/extension.hpp"
#include "hgraph/graph.hpp"
#include "hgraph/measure.hpp"
#include "hgraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Recorder {
public:
    explicit Recorder(std::vector<Check>& out) : out_(out) {}

    void add(const std::string& suite, const std::string& name, double value, const std::string& rel, double thr)
    {
        bool pass = false;
        if (rel == "<")
            pass = value < thr;
        else if (rel == "<=")
            pass = value <= thr;
        else if (rel == "==")
            pass = value == thr;
        else if (rel == ">=")
            pass = value >= thr;
        else if (rel == ">")
            pass = value > thr;
        out_.push_back({suite, name, value, thr, rel, pass});
    }

    /// lo <= value <= hi, recorded as two bounds in one entry.
    void add_in(const std::string& suite, const std::string& name, double value, double lo, double hi)
    {
        out_.push_back({suite, name + " >= " + std::to_string(lo), value, lo, ">=", value >= lo});
        out_.push_back({suite, name + " <= " + std::to_string(hi), value, hi, "<=", value <= hi});
    }

private:
    std::vector<Check>& out_;
};

Point random_point(const CounterRng& rng, std::uint64_t i, std::uint64_t lane0, int n, double lo, double hi)
{
    double h[2 * kMaxN];
    for (int d = 0; d < 2 * n; ++d)
        h[d] = rng.uniform(i, lane0 + d, lo, hi);
    return Point::from_horizontal({h, static_cast<std::size_t>(2 * n)}, rng.uniform(i, lane0 + 2 * n, lo, hi));
}

Grid square_grid(int dims, double half, int count)
{
    return Grid(std::vector<Axis>(dims, Axis{-half, half, count}));
}

SampledFunction sampled(const Splitting& s, const Grid& g, const FunctionSpec& spec, const Metric& m,
                        Interpolation interp = Interpolation::Multilinear)
{
    return SampledFunction::sample(s, g, make_function(spec, s, m), interp);
}

FunctionSpec linear_spec(std::vector<std::vector<double>> m)
{
    FunctionSpec f;
    f.builtin = "intrinsic_linear";
    f.matrix = std::move(m);
    return f;
}

FunctionSpec named(const std::string& name)
{
    FunctionSpec f;
    f.builtin = name;
    return f;
}

FunctionSpec bump_spec(double m, double s)
{
    FunctionSpec f;
    f.builtin = "bump_linear";
    f.matrix = {{m}};
    f.bump = s;
    return f;
}

FunctionSpec cone_spec()
{
    FunctionSpec f;
    f.builtin = "cone_boundary";
    f.vertex = {0.3, -1.5, 0.2};
    f.beta = 1.0;
    return f;
}

void group_suite(Recorder& rec, std::uint64_t seed, std::size_t S)
{
    const CounterRng rng(derive_seed(seed, "verify.group"), 1);
    const Metric inf = Metric::infinity();
    const Metric kor = Metric::koranyi();
    for (int n : {1, 2}) {
        double assoc = 0, ident = 0, inv = 0, dil = 0;
        std::size_t tri_inf = 0, tri_kor = 0;
        for (std::size_t i = 0; i < S; ++i) {
            const Point p = random_point(rng, i, 0, n, -1, 1);
            const Point q = random_point(rng, i, 10, n, -1, 1);
            const Point r = random_point(rng, i, 20, n, -1, 1);
            const double lambda = rng.uniform(i, 30, 0.1, 3.0);
            const Point e(n);
            assoc = std::max(assoc, max_coord_diff((p * q) * r, p * (q * r)));
            ident = std::max({ident, max_coord_diff(p * e, p), max_coord_diff(e * p, p)});
            inv = std::max({inv, max_coord_diff(p * inverse(p), e), max_coord_diff(inverse(p) * p, e)});
            dil = std::max(dil, max_coord_diff(dilate(lambda, p * q), dilate(lambda, p) * dilate(lambda, q)));
            tri_inf += distance(inf, p, r) > distance(inf, p, q) + distance(inf, q, r) + 1e-9;
            tri_kor += distance(kor, p, r) > distance(kor, p, q) + distance(kor, q, r) + 1e-9;
        }
        const std::string tag = "n=" + std::to_string(n) + " ";
        rec.add("group", tag + "associativity residual", assoc, "<", 1e-12);
        rec.add("group", tag + "identity residual", ident, "<", 1e-12);
        rec.add("group", tag + "inverse residual", inv, "<", 1e-12);
        rec.add("group", tag + "dilation homomorphism residual", dil, "<", 1e-12);
        rec.add("group", tag + "triangle violations (infinity)", static_cast<double>(tri_inf), "==", 0);
        rec.add("group", tag + "triangle violations (koranyi)", static_cast<double>(tri_kor), "==", 0);
    }
}

void metric_suite(Recorder& rec, std::uint64_t seed, std::size_t S)
{
    const EquivalenceConstants ec =
        equivalence_constants(Metric::infinity(), Metric::koranyi(), 1, S, derive_seed(seed, "verify.metrics"));
    rec.add("metrics", "koranyi/infinity lower constant", ec.c_low, ">=", 1.0 - 1e-12);
    rec.add("metrics", "koranyi/infinity upper constant", ec.c_high, "<=", std::pow(2.0, 0.25) + 1e-12);

    CcParams cp;
    cp.seed = derive_seed(seed, "verify.cc");
    const Point vertical(std::vector<double>{0.0}, std::vector<double>{0.0}, 1.0);
    const CcResult cr = cc_upper(vertical, cp);
    rec.add_in("metrics", "cc(0,0,1) / sqrt(4 pi)", cr.value / std::sqrt(4.0 * M_PI), 1.0 - 1e-9, 1.01);
    rec.add("metrics", "cc endpoint certified", cr.certified ? 1.0 : 0.0, "==", 1.0);
    const Point p(std::vector<double>{0.3}, std::vector<double>{-0.2}, 0.15);
    const double a = cc_upper(p, cp).value;
    const double b = cc_upper(dilate(2.5, p), cp).value;
    rec.add("metrics", "cc homogeneity relative residual", std::abs(b - 2.5 * a) / (2.5 * a), "<", 1e-9);
}

void splitting_suite(Recorder& rec, std::uint64_t seed, std::size_t S)
{
    for (auto [n, k] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}}) {
        const Splitting s = Splitting::standard(n, k);
        const std::string tag = "(n,k)=(" + std::to_string(n) + "," + std::to_string(k) + ") ";
        const ProjectionIdentityReport r = projection_identities_check(s, S, derive_seed(seed, "verify.split"));
        rec.add("splitting", tag + "projection identity residual",
                std::max({r.pw_product, r.pv_product, r.pw_inverse, r.pv_inverse}), "<", 1e-10);
        rec.add("splitting", tag + "reconstruction residual", r.reconstruction, "<", 1e-12);
        const SplittingConstantReport c =
            norm_splitting_constant(s, Metric::infinity(), S, derive_seed(seed, "verify.split.c"));
        rec.add("splitting", tag + "right inequality violations", static_cast<double>(c.right_violations), "==", 0);
        rec.add("splitting", tag + "splitting constant c_tilde", c.c_tilde, ">", 0.0);
    }
}

void graph_suite(Recorder& rec, std::uint64_t seed, std::size_t S, unsigned threads)
{
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    const Grid g17 = square_grid(2, 1.0, 17);
    ScanOptions on{true, threads}, off{false, threads};

    const SampledFunction lin = sampled(s, g17, linear_spec({{1.5}}), inf);
    const LipschitzResult ll = lipschitz_constant(lin, inf, {}, on);
    rec.add_in("graph", "Lip(intrinsic_linear m=1.5) / 1.5", ll.constant / 1.5, 0.98, 1.001);

    FunctionSpec cst = named("constant");
    cst.value = {0.7};
    rec.add("graph", "Lip(constant)", lipschitz_constant(sampled(s, g17, cst, inf), inf, {}, on).constant, "==", 0.0);

    std::size_t mismatches = 0;
    for (const FunctionSpec& spec : {bump_spec(1.0, 0.3), named("sqrt_cusp"), cone_spec()}) {
        const SampledFunction f = sampled(s, g17, spec, inf);
        const LipschitzResult a = lipschitz_constant(f, inf, {}, on);
        const LipschitzResult b = lipschitz_constant(f, inf, {}, off);
        mismatches += a.constant != b.constant || a.infinite != b.infinite || a.from != b.from || a.to != b.to;
    }
    rec.add("graph", "pruned vs unpruned mismatches", static_cast<double>(mismatches), "==", 0);

    // Restriction monotonicity on nested random subsets.
    const CounterRng rng(derive_seed(seed, "verify.graph"), 2);
    const SampledFunction bump = sampled(s, g17, bump_spec(1.0, 0.3), inf);
    double excess = -kInf;
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<std::uint8_t> big(bump.size()), small(bump.size());
        for (std::size_t i = 0; i < bump.size(); ++i) {
            const double u = rng.uniform(trial, i);
            big[i] = u < 0.6;
            small[i] = u < 0.3;
        }
        excess = std::max(excess, lipschitz_constant(bump, inf, small, on).constant -
                                      lipschitz_constant(bump, inf, big, on).constant);
    }
    rec.add("graph", "restriction monotonicity excess", excess, "<=", 1e-12);

    // C_j monotonicity, brute force on a small grid.
    const Grid g9 = square_grid(2, 1.0, 9);
    const SampledFunction small_bump = sampled(s, g9, bump_spec(1.0, 0.3), inf);
    const int j_max = 16;
    const LipReport rep = classify_stepanov(small_bump, inf, j_max, {}, on);
    std::size_t cj_violations = 0;
    for (std::size_t i = 0; i < small_bump.size(); ++i) {
        if (rep.labels[i] <= 0)
            continue;
        const Point pi = small_bump.graph_point(i);
        const Point wi = inverse(small_bump.domain_point(i));
        for (int j = rep.labels[i]; j <= j_max; ++j)
            for (std::size_t o = 0; o < small_bump.size(); ++o) {
                if (o == i)
                    continue;
                const double d = norm(inf, wi * small_bump.domain_point(o));
                const PairNorms pn = pair_norms(s, inf, pi, small_bump.graph_point(o));
                cj_violations += d < 1.0 / j && in_closed_cone(pn.w, pn.v, 1.0 / j);
            }
    }
    rec.add("graph", "C_j monotonicity violations", static_cast<double>(cj_violations), "==", 0);

    // Quasi-triangle constant and ambient/graph distance band.
    double quasi = 0.0, band_lo = kInf, band_hi = 0.0;
    for (const FunctionSpec& spec : {linear_spec({{1.0}}), bump_spec(1.0, 0.3), cone_spec(), named("zero")}) {
        const SampledFunction f = sampled(s, g17, spec, inf);
        const CounterRng tr(derive_seed(seed, "verify.quasi." + spec.builtin), 3);
        for (std::size_t i = 0; i < S; ++i) {
            std::vector<double> w1{tr.uniform(i, 0, -0.8, 0.8), tr.uniform(i, 1, -0.8, 0.8)};
            std::vector<double> w2{tr.uniform(i, 2, -0.8, 0.8), tr.uniform(i, 3, -0.8, 0.8)};
            std::vector<double> w3{tr.uniform(i, 4, -0.8, 0.8), tr.uniform(i, 5, -0.8, 0.8)};
            const double r12 = graph_quasidistance(f, inf, w1, w2);
            const double r13 = graph_quasidistance(f, inf, w1, w3);
            const double r32 = graph_quasidistance(f, inf, w3, w2);
            if (r13 + r32 > 0.0)
                quasi = std::max(quasi, r12 / (r13 + r32));
            if (r12 > 0.0) {
                const double d = distance(inf, f.graph_point(w1), f.graph_point(w2));
                band_lo = std::min(band_lo, d / r12);
                band_hi = std::max(band_hi, d / r12);
            }
        }
    }
    rec.add("graph", "quasi-triangle constant", quasi, "<", 1e6);
    rec.add_in("graph", "d / rho band", band_lo, 1e-3, 1e3);
    rec.add_in("graph", "d / rho band upper", band_hi, 1e-3, 1e3);

    // Label existence survives translation for linear data.
    std::size_t lost = 0;
    const LipReport lrep = classify_stepanov(lin, inf, j_max, {}, on);
    for (std::size_t node : {g17.size() / 2, g17.size() / 2 + 2, g17.size() / 2 - 17 * 2 + 1}) {
        const TranslatedFunction t = translate_function(lin, node);
        const LipReport trep = classify_stepanov(t.function, inf, j_max, {}, on);
        lost += (lrep.labels[node] > 0) != (trep.labels[center_node(t.function.grid())] > 0);
    }
    rec.add("graph", "translation label-existence mismatches", static_cast<double>(lost), "==", 0);
}

void diff_suite(Recorder& rec, std::uint64_t seed)
{
    const Metric inf = Metric::infinity();
    const Splitting s11 = Splitting::standard(1, 1);
    const Grid g33 = square_grid(2, 1.0, 33);

    const SampledFunction lin = sampled(s11, g33, linear_spec({{0.7}}), inf);
    const DiffEstimate e0 = estimate_differential(lin, inf, center_node(g33));
    rec.add("diff", "n=1 linear fit error", std::abs(e0.matrix(0, 0) - 0.7), "<", 1e-9);
    rec.add("diff", "n=1 linear max residual", *std::max_element(e0.residuals.begin(), e0.residuals.end()), "<",
            1e-9);

    const Splitting s21 = Splitting::standard(2, 1);
    const SampledFunction lin3 = sampled(s21, square_grid(4, 1.0, 11), linear_spec({{0.5, -0.3, 0.2}}), inf);
    const DiffEstimate e3 = estimate_differential(lin3, inf, center_node(lin3.grid()));
    Eigen::MatrixXd m0(1, 3);
    m0 << 0.5, -0.3, 0.2;
    rec.add("diff", "n=2 linear fit error", (e3.matrix - m0).cwiseAbs().maxCoeff(), "<", 1e-9);

    const SampledFunction vert = sampled(s11, square_grid(2, 1.0, 65), named("vertical_coordinate"), inf);
    const DiffEstimate ev = estimate_differential(vert, inf, center_node(vert.grid()));
    rec.add("diff", "vertical_coordinate |M|", std::abs(ev.matrix(0, 0)), "<", 1e-9);
    double worst = 0.0;
    for (std::size_t i = 0; i < ev.radii.size(); ++i)
        worst = std::max(worst, ev.residuals[i] / (ev.radii[i] / 4.0));
    rec.add("diff", "vertical_coordinate residual / (r/4)", worst, "<=", 1.1);

    const IntrinsicLinearMap map(s21, m0);
    rec.add("diff", "linear graph closure residual", linear_closure_residual(map, 256, derive_seed(seed, "verify.lin")),
            "<", 1e-10);

    const TangentSubgroup t(s21, m0);
    const CounterRng rng(derive_seed(seed, "verify.step5"), 4);
    double step5 = 0.0;
    for (std::uint64_t i = 0; i < 256; ++i) {
        std::vector<double> w(s21.w_dim());
        for (int d = 0; d < s21.w_dim(); ++d)
            w[d] = rng.uniform(i, d, -2, 2);
        const double v1 = rng.uniform(i, 10, -2, 2), v2 = rng.uniform(i, 11, -2, 2);
        const Point p1 = s21.embed_w(w) * s21.embed_v(std::vector<double>{v1});
        const Point p2 = s21.embed_w(w) * s21.embed_v(std::vector<double>{v2});
        step5 = std::max(step5, max_coord_diff(t.decompose(p1).w, t.decompose(p2).w));
    }
    rec.add("diff", "T-components of graph pairs sharing a W-component", step5, "<", 1e-10);

    // Translation invariance of estimates under nearest interpolation.
    const SampledFunction bn = sampled(s11, g33, bump_spec(0.8, 0.5), inf, Interpolation::Nearest);
    std::size_t diffs = 0;
    for (std::size_t node : {std::size_t{16 * 33 + 20}, std::size_t{14 * 33 + 15}}) {
        const DiffEstimate direct = estimate_differential(bn, inf, node);
        const TranslatedFunction tr = translate_function(bn, node);
        const DiffEstimate again = estimate_differential(tr.function, inf, center_node(tr.function.grid()));
        diffs += direct.matrix != again.matrix || direct.residuals != again.residuals ||
                 direct.verdict != again.verdict;
    }
    rec.add("diff", "translation invariance mismatches (nearest)", static_cast<double>(diffs), "==", 0);
}

void ext_suite(Recorder& rec, unsigned threads)
{
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    const Grid g = square_grid(2, 1.0, 17);
    ScanOptions on{true, threads};

    const ConeBoundaryFn gf(s, Point(1), 2.0);
    rec.add("ext1", "cone_boundary at unit norm, beta=2", std::abs(gf.upper(inf, std::vector<double>{1.0, 0.0}) - 0.5),
            "<", 1e-15);

    const SampledFunction bump = sampled(s, g, bump_spec(1.0, 0.3), inf);
    auto stride_mask = [&](int stride) {
        std::vector<std::uint8_t> m(g.size());
        std::vector<int> mi(2);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.multi_index(i, mi);
            m[i] = mi[0] % stride == 0 && mi[1] % stride == 0;
        }
        return m;
    };
    const auto e4 = stride_mask(4), e2 = stride_mask(2);
    const double L = lipschitz_constant(bump, inf, e2, on).constant;
    const ExtensionResult r4 = mcshane_extend(bump, e4, L, inf, on);
    const ExtensionResult r2 = mcshane_extend(bump, e2, L, inf, on);
    double agree = 0.0, order = -kInf;
    std::size_t mono = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double phi = bump.value(i)[0];
        for (const ExtensionResult* r : {&r4, &r2}) {
            if (r->subset[i])
                agree = std::max({agree, std::abs(r->upper.value(i)[0] - phi), std::abs(r->lower.value(i)[0] - phi)});
            order = std::max(order, r->lower.value(i)[0] - r->upper.value(i)[0]);
        }
        mono += r2.upper.value(i)[0] > r4.upper.value(i)[0] + 1e-12;
        mono += r2.lower.value(i)[0] < r4.lower.value(i)[0] - 1e-12;
    }
    rec.add("ext1", "agreement on E", agree, "<=", 1e-12);
    rec.add("ext1", "max(psi - eta)", order, "<=", 1e-12);
    rec.add("ext1", "monotonicity-in-E violations", static_cast<double>(mono), "==", 0);
    rec.add("ext1", "Lip(eta) finite", r2.upper_lip.infinite ? 1.0 : 0.0, "==", 0);

    const SampledFunction lin = sampled(s, g, linear_spec({{1.5}}), inf);
    const std::vector<std::uint8_t> all(g.size(), 1);
    const ExtensionResult rl = mcshane_extend(lin, all, lipschitz_constant(lin, inf, {}, on).constant, inf, on);
    double lin_gap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        lin_gap = std::max({lin_gap, std::abs(rl.upper.value(i)[0] - lin.value(i)[0]),
                            std::abs(rl.lower.value(i)[0] - lin.value(i)[0])});
    rec.add("ext1", "linear full-grid |eta - phi|, |psi - phi|", lin_gap, "<=", 1e-12);

    // Dilation commutation of the envelopes.
    std::vector<Point> verts, scaled;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (e4[i]) {
            verts.push_back(bump.graph_point(i));
            scaled.push_back(dilate(0.5, verts.back()));
        }
    double dil = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 7) {
        const auto w = g.coords(i);
        const std::vector<double> wl{0.5 * w[0], 0.25 * w[1]};
        dil = std::max(dil, std::abs(upper_envelope(s, inf, scaled, L, wl) - 0.5 * upper_envelope(s, inf, verts, L, w)));
        dil = std::max(dil, std::abs(lower_envelope(s, inf, scaled, L, wl) - 0.5 * lower_envelope(s, inf, verts, L, w)));
    }
    rec.add("ext1", "dilation commutation residual", dil, "<", 1e-12);
}

void measure_suite(Recorder& rec, std::uint64_t seed, std::size_t S, unsigned threads)
{
    const Metric inf = Metric::infinity();
    const Splitting s = Splitting::standard(1, 1);
    const SampledFunction zero = sampled(s, square_grid(2, 2.0, 9), named("zero"), inf);
    MeasureOptions opt{25 * S, derive_seed(seed, "verify.measure"), threads};
    const Point origin(1);
    const MeasureEstimate a = pushforward_ball_measure(zero, inf, origin, 0.25, opt);
    const MeasureEstimate b = pushforward_ball_measure(zero, inf, origin, 0.5, opt);
    rec.add("measure", "|mu(B(0,1/2)) - 1/8| / stderr", std::abs(b.estimate - 0.125) / b.stderr_, "<=", 3.0);
    const double ratio = b.estimate / a.estimate;
    const double sigma = ratio * std::hypot(a.stderr_ / a.estimate, b.stderr_ / b.estimate);
    rec.add("measure", "|doubling ratio - 8| / sigma", std::abs(ratio - 8.0) / sigma, "<=", 3.0);
    MeasureOptions other = opt;
    other.threads = threads == 1 ? 3 : 1;
    const MeasureEstimate c = pushforward_ball_measure(zero, inf, origin, 0.5, other);
    rec.add("measure", "thread-count dependence", c.estimate == b.estimate ? 0.0 : 1.0, "==", 0);
}

void cli_suite(Recorder& rec, const RunConfig& config)
{
    const RunConfig back = parse_config(to_json(config));
    rec.add("cli", "config round-trip mismatch", back == config ? 0.0 : 1.0, "==", 0);
    std::size_t missing = 0;
    for (const char* name : {"zero", "constant", "intrinsic_linear", "vertical_coordinate", "sqrt_cusp",
                             "cone_boundary", "bump_linear"})
        missing += find_builtin(name) == nullptr;
    rec.add("cli", "missing builtins", static_cast<double>(missing), "==", 0);
}

}  // namespace

std::size_t VerifyReport::failed() const
{
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
}

nlohmann::json VerifyReport::to_json(std::uint64_t seed) const
{
    nlohmann::json j;
    j["seed"] = seed;
    j["total"] = checks.size();
    j["failed"] = failed();
    nlohmann::json arr = nlohmann::json::array();
    for (const Check& c : checks) {
        nlohmann::json e;
        e["suite"] = c.suite;
        e["name"] = c.name;
        if (std::isfinite(c.value))
            e["value"] = c.value;
        else
            e["value"] = c.value > 0 ? "inf" : (c.value < 0 ? "-inf" : "nan");
        e["relation"] = c.relation;
        e["threshold"] = c.threshold;
        e["pass"] = c.pass;
        arr.push_back(e);
    }
    j["checks"] = arr;
    return j;
}

VerifyReport run_verify_suite(const RunConfig& config)
{
    VerifyReport report;
    Recorder rec(report.checks);
    const std::size_t S = config.verify.samples;
    const unsigned threads = config.threads;
    group_suite(rec, config.seed, S);
    metric_suite(rec, config.seed, S);
    splitting_suite(rec, config.seed, S);
    graph_suite(rec, config.seed, std::max<std::size_t>(S / 4, 1), threads);
    diff_suite(rec, config.seed);
    ext_suite(rec, threads);
    measure_suite(rec, config.seed, S, threads);
    cli_suite(rec, config);
    return report;
}

}  // namespace hgraph
