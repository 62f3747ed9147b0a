#include "hgraph/graph.hpp"

#include "hgraph/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative margin on pruning bounds, covering roundoff and the cc optimizer
// returning a horizontal norm marginally above the Euclidean one.
constexpr double kBoundMargin = 1e-6;

int horizontal_axes(const SampledFunction& f)
{
    return f.orientation() == Orientation::WtoV ? f.domain_dim() - 1 : f.domain_dim();
}

/// Blocks of neighbouring grid nodes with bounding boxes of their horizontal
/// domain coordinates and of their values.
struct CellList {
    int hdim = 0;
    int vdim = 0;
    std::vector<std::vector<std::size_t>> nodes;
    std::vector<double> lo, hi, vlo, vhi;

    std::size_t size() const { return nodes.size(); }

    double point_gap(std::size_t c, const double* x) const
    {
        double s = 0.0;
        for (int d = 0; d < hdim; ++d) {
            const double g = std::max({0.0, lo[c * hdim + d] - x[d], x[d] - hi[c * hdim + d]});
            s += g * g;
        }
        return std::sqrt(s);
    }

    double cell_gap(std::size_t a, std::size_t b) const
    {
        double s = 0.0;
        for (int d = 0; d < hdim; ++d) {
            const double g = std::max({0.0, lo[b * hdim + d] - hi[a * hdim + d], lo[a * hdim + d] - hi[b * hdim + d]});
            s += g * g;
        }
        return std::sqrt(s);
    }

    double value_spread(std::size_t a, std::size_t b) const
    {
        double s = 0.0;
        for (int d = 0; d < vdim; ++d) {
            const double g = std::max(vhi[a * vdim + d], vhi[b * vdim + d]) - std::min(vlo[a * vdim + d], vlo[b * vdim + d]);
            s += g * g;
        }
        return std::sqrt(s);
    }

    double value_reach(std::size_t c, std::span<const double> v) const
    {
        double s = 0.0;
        for (int d = 0; d < vdim; ++d) {
            const double g = std::max(std::abs(v[d] - vlo[c * vdim + d]), std::abs(v[d] - vhi[c * vdim + d]));
            s += g * g;
        }
        return std::sqrt(s);
    }
};

CellList build_cells(const SampledFunction& f, const std::vector<std::uint8_t>& use)
{
    const Grid& grid = f.grid();
    const int D = grid.dim();
    CellList cl;
    cl.hdim = horizontal_axes(f);
    cl.vdim = f.value_dim();

    const int per_axis = std::max(1, static_cast<int>(std::floor(std::pow(1024.0, 1.0 / D) + 1e-9)));
    std::vector<int> block(D), blocks(D);
    for (int a = 0; a < D; ++a) {
        const int count = grid.axes()[a].count;
        block[a] = (count + per_axis - 1) / per_axis;
        blocks[a] = (count + block[a] - 1) / block[a];
    }
    std::size_t total = 1;
    for (int a = 0; a < D; ++a)
        total *= blocks[a];
    std::vector<std::vector<std::size_t>> buckets(total);
    std::vector<int> mi(D);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!use[i])
            continue;
        grid.multi_index(i, mi);
        std::size_t key = 0;
        for (int a = 0; a < D; ++a)
            key = key * blocks[a] + mi[a] / block[a];
        buckets[key].push_back(i);
    }
    std::vector<double> x(D);
    for (auto& b : buckets) {
        if (b.empty())
            continue;
        const std::size_t c = cl.nodes.size();
        cl.lo.resize((c + 1) * cl.hdim, kInf);
        cl.hi.resize((c + 1) * cl.hdim, -kInf);
        cl.vlo.resize((c + 1) * cl.vdim, kInf);
        cl.vhi.resize((c + 1) * cl.vdim, -kInf);
        for (std::size_t i : b) {
            grid.coords(i, x);
            for (int d = 0; d < cl.hdim; ++d) {
                cl.lo[c * cl.hdim + d] = std::min(cl.lo[c * cl.hdim + d], x[d]);
                cl.hi[c * cl.hdim + d] = std::max(cl.hi[c * cl.hdim + d], x[d]);
            }
            const auto v = f.value(i);
            for (int d = 0; d < cl.vdim; ++d) {
                cl.vlo[c * cl.vdim + d] = std::min(cl.vlo[c * cl.vdim + d], v[d]);
                cl.vhi[c * cl.vdim + d] = std::max(cl.vhi[c * cl.vdim + d], v[d]);
            }
        }
        cl.nodes.push_back(std::move(b));
    }
    return cl;
}

std::vector<std::uint8_t> selection(const SampledFunction& f, std::span<const std::uint8_t> subset)
{
    if (!subset.empty() && subset.size() != f.size())
        throw std::invalid_argument("subset mask size does not match the grid");
    std::vector<std::uint8_t> use(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        use[i] = f.active(i) && (subset.empty() || subset[i]);
    return use;
}

std::vector<Point> graph_points(const SampledFunction& f, const std::vector<std::uint8_t>& use)
{
    std::vector<Point> pts(f.size(), Point(f.splitting().n()));
    for (std::size_t i = 0; i < f.size(); ++i)
        if (use[i])
            pts[i] = f.graph_point(i);
    return pts;
}

std::vector<Point> domain_points(const SampledFunction& f, const std::vector<std::uint8_t>& use)
{
    std::vector<Point> pts(f.size(), Point(f.splitting().n()));
    for (std::size_t i = 0; i < f.size(); ++i)
        if (use[i])
            pts[i] = f.domain_point(i);
    return pts;
}

void require_w_to_v(const SampledFunction& f, const char* what)
{
    if (f.orientation() != Orientation::WtoV)
        throw std::invalid_argument(std::string(what) + " needs a W -> V function");
}

struct Best {
    double ratio = -1.0;
    std::size_t from = 0, to = 0;
    std::size_t evaluated = 0;

    void offer(double r, std::size_t i, std::size_t j)
    {
        if (r > ratio || (r == ratio && std::make_pair(i, j) < std::make_pair(from, to))) {
            ratio = r;
            from = i;
            to = j;
        }
    }
};

void atomic_max(std::atomic<double>& target, double value)
{
    double cur = target.load(std::memory_order_relaxed);
    while (value > cur && !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
    }
}

// Largest j <= cap with d < 1/j (0 when d >= 1).
int ball_depth(double d, int cap)
{
    if (!(d > 0.0))
        return cap;
    const double q = 1.0 / d;
    int j = q >= cap ? cap : static_cast<int>(q);
    while (j >= 1 && !(d < 1.0 / j))
        --j;
    while (j < cap && d < 1.0 / (j + 1))
        ++j;
    return j;
}

// Largest j <= cap such that the pair lies in the closed cone of opening 1/j.
int cone_depth(double a, double b, int cap)
{
    if (in_closed_cone(a, b, 1.0 / cap))
        return cap;
    if (!in_closed_cone(a, b, 1.0))
        return 0;
    int lo = 1, hi = cap;  // holds at lo, fails at hi
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (in_closed_cone(a, b, 1.0 / mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// Norms of the splitting parts of p^-1 q and q^-1 p from one product, for the
/// metrics with closed-form norms. With g = p^-1 q = w v, the parts of g^-1 are
/// v^-1 and v^-1 w^-1 v.
class PairKernel {
public:
    PairKernel(const Splitting& s, const Metric& metric)
        : fast_(metric.kind() != MetricKind::CarnotCaratheodory), koranyi_(metric.kind() == MetricKind::Koranyi),
          n_(s.n()), k_(s.k()), dual_(s.dual()), frame_(s.v_frame())
    {
    }

    bool fast() const { return fast_; }

    void both(const double* ph, double pt, const double* qh, double qt, PairNorms& forward, PairNorms& backward) const
    {
        const int H = 2 * n_;
        double gh[2 * kMaxN], vh[2 * kMaxN], wh[2 * kMaxN];
        for (int i = 0; i < H; ++i)
            gh[i] = qh[i] - ph[i];
        double gt = qt - pt - 0.5 * omega(ph, qh);
        std::fill(vh, vh + H, 0.0);
        for (int r = 0; r < k_; ++r) {
            const double* row = dual_.data() + r * H;
            double c = 0.0;
            for (int i = 0; i < H; ++i)
                c += row[i] * gh[i];
            const auto& e = frame_[r];
            for (int i = 0; i < H; ++i)
                vh[i] += c * e[i];
        }
        double v2 = 0.0, w2 = 0.0;
        for (int i = 0; i < H; ++i) {
            wh[i] = gh[i] - vh[i];
            v2 += vh[i] * vh[i];
            w2 += wh[i] * wh[i];
        }
        const double wt = gt - 0.5 * omega(gh, vh);
        const double back_t = -wt - omega(wh, vh);
        const double vn = std::sqrt(v2);
        forward = {radial(w2, wt), vn};
        backward = {radial(w2, back_t), vn};
    }

private:
    double omega(const double* a, const double* b) const
    {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            s += a[i] * b[n_ + i] - b[i] * a[n_ + i];
        return s;
    }

    double radial(double h2, double t) const
    {
        if (koranyi_)
            return std::pow(h2 * h2 + 16.0 * t * t, 0.25);
        return std::max(std::sqrt(h2), 2.0 * std::sqrt(std::abs(t)));
    }

    bool fast_;
    bool koranyi_;
    int n_, k_;
    std::span<const double> dual_;
    const Frame& frame_;
};

}  // namespace

PairNorms pair_norms(const Splitting& s, const Metric& metric, const Point& p, const Point& q)
{
    const PairKernel kernel(s, metric);
    if (kernel.fast()) {
        PairNorms forward, backward;
        kernel.both(p.horizontal().data(), p.t(), q.horizontal().data(), q.t(), forward, backward);
        return forward;
    }
    const Components c = s.project(multiply(inverse(p), q));
    return {norm(metric, c.w), norm(metric, c.v)};
}

double pair_ratio(const PairNorms& pn)
{
    if (pn.v > kInfiniteRatio * pn.w)
        return kInf;
    if (pn.w == 0.0)
        return 0.0;
    return pn.v / pn.w;
}

LipschitzResult lipschitz_constant(const SampledFunction& f, const Metric& metric,
                                   std::span<const std::uint8_t> subset, ScanOptions options)
{
    require_w_to_v(f, "lipschitz_constant");
    const std::vector<std::uint8_t> use = selection(f, subset);
    if (std::count(use.begin(), use.end(), 1) < 2)
        throw std::invalid_argument("lipschitz_constant needs at least two points");
    const std::vector<Point> pts = graph_points(f, use);
    const CellList cl = build_cells(f, use);
    const Splitting& s = f.splitting();

    struct CellPair {
        double gap;
        std::size_t a, b;
    };
    std::vector<CellPair> pairs;
    pairs.reserve(cl.size() * (cl.size() + 1) / 2);
    for (std::size_t a = 0; a < cl.size(); ++a)
        for (std::size_t b = a; b < cl.size(); ++b)
            pairs.push_back({cl.cell_gap(a, b), a, b});
    std::sort(pairs.begin(), pairs.end(), [](const CellPair& x, const CellPair& y) {
        return std::tie(x.gap, x.a, x.b) < std::tie(y.gap, y.a, y.b);
    });

    unsigned threads = options.threads == 0 ? default_threads() : options.threads;
    const std::size_t stripes = std::min<std::size_t>(threads, pairs.size());
    std::vector<Best> results(stripes);
    std::atomic<double> shared{-1.0};

    const PairKernel kernel(s, metric);
    const int H = 2 * s.n();
    std::vector<double> ph(pts.size() * H), pt(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::copy_n(pts[i].horizontal().data(), H, ph.data() + i * H);
        pt[i] = pts[i].t();
    }

    // Both orders of the pair.
    auto visit = [&](std::size_t i, std::size_t j, Best& best) {
        PairNorms forward, backward;
        if (kernel.fast()) {
            kernel.both(ph.data() + i * H, pt[i], ph.data() + j * H, pt[j], forward, backward);
        } else {
            forward = pair_norms(s, metric, pts[i], pts[j]);
            backward = pair_norms(s, metric, pts[j], pts[i]);
        }
        const double r = pair_ratio(forward);
        const double rb = pair_ratio(backward);
        best.evaluated += 2;
        best.offer(r, i, j);
        best.offer(rb, j, i);
        atomic_max(shared, std::max(r, rb));
    };

    parallel_for(stripes, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t stripe = begin; stripe < end; ++stripe) {
            Best& best = results[stripe];
            for (std::size_t k = stripe; k < pairs.size(); k += stripes) {
                const CellPair& cp = pairs[k];
                if (options.prune && cp.gap > 0.0) {
                    const double ub = cl.value_spread(cp.a, cp.b) / cp.gap * (1.0 + kBoundMargin);
                    const double cur = shared.load(std::memory_order_relaxed);
                    if (ub < std::min(cur, kInfiniteRatio))
                        continue;
                }
                const auto& na = cl.nodes[cp.a];
                const auto& nb = cl.nodes[cp.b];
                if (cp.a == cp.b) {
                    for (std::size_t x = 0; x < na.size(); ++x)
                        for (std::size_t y = x + 1; y < na.size(); ++y)
                            visit(na[x], na[y], best);
                } else {
                    for (std::size_t i : na)
                        for (std::size_t j : nb)
                            visit(i, j, best);
                }
            }
        }
    });

    Best total;
    for (const Best& b : results) {
        total.evaluated += b.evaluated;
        if (b.ratio >= 0.0)
            total.offer(b.ratio, b.from, b.to);
    }
    LipschitzResult out;
    out.constant = std::max(total.ratio, 0.0);
    out.infinite = std::isinf(total.ratio);
    out.from = total.from;
    out.to = total.to;
    out.pairs_evaluated = total.evaluated;
    return out;
}

double graph_quasidistance(const SampledFunction& f, const Metric& metric, std::span<const double> w1,
                           std::span<const double> w2)
{
    require_w_to_v(f, "graph_quasidistance");
    const Point p1 = f.graph_point(w1);
    const Point p2 = f.graph_point(w2);
    const Splitting& s = f.splitting();
    const double a = norm(metric, s.project(multiply(inverse(p1), p2)).w);
    const double b = norm(metric, s.project(multiply(inverse(p2), p1)).w);
    return 0.5 * (a + b);
}

double graph_quasidistance(const SampledFunction& f, const Metric& metric, std::size_t i, std::size_t j)
{
    const auto w1 = f.grid().coords(i);
    const auto w2 = f.grid().coords(j);
    return graph_quasidistance(f, metric, w1, w2);
}

double profile_floor_radius(const SampledFunction& f)
{
    double step = 0.0;
    const int h = horizontal_axes(f);
    for (int a = 0; a < h; ++a)
        step = std::max(step, f.grid().axes()[a].step());
    return 2.0 * step;
}

namespace {

void check_radii(std::span<const double> radii)
{
    for (double r : radii)
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("profile radii must be positive and finite");
}

// Max ratio per radius among the given (distance, ratio) samples.
std::vector<double> fold_profile(std::vector<std::pair<double, double>>& samples, std::span<const double> radii)
{
    std::sort(samples.begin(), samples.end());
    std::vector<std::size_t> order(radii.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return radii[x] < radii[y]; });
    std::vector<double> out(radii.size(), 0.0);
    double running = 0.0;
    std::size_t k = 0;
    for (std::size_t o : order) {
        while (k < samples.size() && samples[k].first < radii[o]) {
            running = std::max(running, samples[k].second);
            ++k;
        }
        out[o] = running;
    }
    return out;
}

std::vector<double> profile_at(const SampledFunction& f, const Metric& metric, const CellList& cl,
                               const std::vector<Point>& dom, const std::vector<Point>& pts, std::size_t node,
                               std::span<const double> radii, bool prune)
{
    const double rmax = *std::max_element(radii.begin(), radii.end());
    const auto x = f.grid().coords(node);
    const Point winv = inverse(dom[node]);
    std::vector<std::pair<double, double>> samples;
    for (std::size_t c = 0; c < cl.size(); ++c) {
        if (prune && cl.point_gap(c, x.data()) >= rmax)
            continue;
        for (std::size_t j : cl.nodes[c]) {
            if (j == node)
                continue;
            const double d = norm(metric, multiply(winv, dom[j]));
            if (!(d < rmax))
                continue;
            samples.emplace_back(d, pair_ratio(pair_norms(f.splitting(), metric, pts[node], pts[j])));
        }
    }
    return fold_profile(samples, radii);
}

}  // namespace

std::vector<double> pointwise_lip_profile(const SampledFunction& f, const Metric& metric, std::size_t node,
                                          std::span<const double> radii, ScanOptions options)
{
    require_w_to_v(f, "pointwise_lip_profile");
    check_radii(radii);
    if (radii.empty())
        return {};
    if (node >= f.size() || !f.active(node))
        throw std::out_of_range("profile base node is not in the active domain");
    const std::vector<std::uint8_t> use = selection(f, {});
    const CellList cl = build_cells(f, use);
    return profile_at(f, metric, cl, domain_points(f, use), graph_points(f, use), node, radii, options.prune);
}

std::size_t LipReport::labeled_count() const
{
    return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l > 0; }));
}

LipReport classify_stepanov(const SampledFunction& f, const Metric& metric, int j_max, std::span<const double> radii,
                            ScanOptions options)
{
    require_w_to_v(f, "classify_stepanov");
    if (j_max < 1)
        throw std::invalid_argument("j_max must be at least 1");
    check_radii(radii);
    const std::vector<std::uint8_t> use = selection(f, {});
    const CellList cl = build_cells(f, use);
    const std::vector<Point> dom = domain_points(f, use);
    const std::vector<Point> pts = graph_points(f, use);
    const Splitting& s = f.splitting();

    LipReport rep;
    rep.j_max = j_max;
    rep.radii.assign(radii.begin(), radii.end());
    rep.labels.assign(f.size(), -1);
    if (!radii.empty())
        rep.profiles.assign(f.size() * radii.size(), 0.0);

    parallel_for(f.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = begin; i < end; ++i) {
            if (!use[i])
                continue;
            const auto x = f.grid().coords(i);
            const auto vi = f.value(i);
            const Point winv = inverse(dom[i]);
            order.clear();
            for (std::size_t c = 0; c < cl.size(); ++c) {
                const double g = cl.point_gap(c, x.data());
                if (g < 1.0 || !options.prune)
                    order.emplace_back(g, c);
            }
            std::sort(order.begin(), order.end());
            int worst = 0;
            for (const auto& [gap, c] : order) {
                if (worst >= j_max)
                    break;
                const double need = 1.0 / (worst + 1);
                if (options.prune) {
                    if (gap >= need)
                        break;
                    if (gap > kConeSlack) {
                        const double ub = cl.value_reach(c, vi) / (gap - kConeSlack) * (1.0 + kBoundMargin);
                        if (ub < worst + 1)
                            continue;
                    }
                }
                for (std::size_t j : cl.nodes[c]) {
                    if (j == i)
                        continue;
                    const double d = norm(metric, multiply(winv, dom[j]));
                    if (!(d < need))
                        continue;
                    const PairNorms pn = pair_norms(s, metric, pts[i], pts[j]);
                    const int depth = std::min(ball_depth(d, j_max), cone_depth(pn.w, pn.v, j_max));
                    worst = std::max(worst, depth);
                    if (worst >= j_max)
                        break;
                }
            }
            rep.labels[i] = worst + 1 <= j_max ? worst + 1 : 0;
            if (!radii.empty()) {
                const auto prof = profile_at(f, metric, cl, dom, pts, i, radii, options.prune);
                std::copy(prof.begin(), prof.end(), rep.profiles.begin() + i * radii.size());
            }
        }
    });

    if (std::count(use.begin(), use.end(), 1) >= 2)
        rep.global = lipschitz_constant(f, metric, {}, options);
    return rep;
}

namespace {

double set_diameter(const Metric& metric, const std::vector<Point>& dom, const std::vector<std::size_t>& nodes)
{
    double diam = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        const Point inv = inverse(dom[nodes[a]]);
        for (std::size_t b = a + 1; b < nodes.size(); ++b)
            diam = std::max(diam, norm(metric, multiply(inv, dom[nodes[b]])));
    }
    return diam;
}

void bisect(const SampledFunction& f, const Metric& metric, const std::vector<Point>& dom,
            std::vector<std::size_t> nodes, double limit, std::vector<std::vector<std::size_t>>& out)
{
    constexpr std::size_t kExactBelow = 512;
    if (nodes.size() <= 1 || (nodes.size() <= kExactBelow && set_diameter(metric, dom, nodes) < limit)) {
        if (!nodes.empty())
            out.push_back(std::move(nodes));
        return;
    }
    const int D = f.domain_dim();
    const bool has_t = f.orientation() == Orientation::WtoV;
    std::vector<double> lo(D, kInf), hi(D, -kInf), x(D);
    for (std::size_t i : nodes) {
        f.grid().coords(i, x);
        for (int a = 0; a < D; ++a) {
            lo[a] = std::min(lo[a], x[a]);
            hi[a] = std::max(hi[a], x[a]);
        }
    }
    int axis = 0;
    double widest = -1.0;
    for (int a = 0; a < D; ++a) {
        const double ext = hi[a] - lo[a];
        const double scaled = (has_t && a == D - 1) ? 2.0 * std::sqrt(ext) : ext;
        if (ext > 0.0 && scaled > widest) {
            widest = scaled;
            axis = a;
        }
    }
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(nodes.size());
    for (std::size_t i : nodes) {
        f.grid().coords(i, x);
        keyed.emplace_back(x[axis], i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::size_t mid = keyed.size() / 2;
    // Keep equal coordinates together so that both halves shrink along `axis`.
    while (mid < keyed.size() && mid > 0 && keyed[mid].first == keyed[mid - 1].first)
        ++mid;
    if (mid == keyed.size()) {
        mid = keyed.size() / 2;
        while (mid > 0 && keyed[mid].first == keyed[mid - 1].first)
            --mid;
    }
    if (mid == 0)
        mid = keyed.size() / 2;
    std::vector<std::size_t> left, right;
    for (std::size_t k = 0; k < keyed.size(); ++k)
        (k < mid ? left : right).push_back(keyed[k].second);
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    bisect(f, metric, dom, std::move(left), limit, out);
    bisect(f, metric, dom, std::move(right), limit, out);
}

}  // namespace

std::vector<std::vector<std::size_t>> stepanov_cells(const SampledFunction& f, const Metric& metric,
                                                     const LipReport& report, int j)
{
    if (j < 1)
        throw std::invalid_argument("stepanov_cells needs j >= 1");
    if (report.labels.size() != f.size())
        throw std::invalid_argument("report does not belong to this function");
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (report.labels[i] >= 1 && report.labels[i] <= j)
            members.push_back(i);
    const std::vector<std::uint8_t> use = selection(f, {});
    const std::vector<Point> dom = domain_points(f, use);
    std::vector<std::vector<std::size_t>> out;
    bisect(f, metric, dom, std::move(members), 1.0 / j, out);
    return out;
}

std::vector<LipschitzResult> cell_lipschitz_constants(const SampledFunction& f, const Metric& metric,
                                                      const std::vector<std::vector<std::size_t>>& cells,
                                                      ScanOptions options)
{
    std::vector<LipschitzResult> out;
    out.reserve(cells.size());
    std::vector<std::uint8_t> mask(f.size(), 0);
    for (const auto& cell : cells) {
        if (cell.size() < 2) {
            out.push_back({});
            continue;
        }
        for (std::size_t i : cell)
            mask[i] = 1;
        out.push_back(lipschitz_constant(f, metric, mask, options));
        for (std::size_t i : cell)
            mask[i] = 0;
    }
    return out;
}

std::size_t center_node(const Grid& grid)
{
    std::vector<int> mi(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        const Axis& ax = grid.axes()[a];
        if (ax.count % 2 == 0 || ax.min != -ax.max)
            throw std::invalid_argument("grid is not centered at the origin");
        mi[a] = (ax.count - 1) / 2;
    }
    return grid.index(mi);
}

TranslatedFunction translate_function(const SampledFunction& f, std::span<const double> wbar)
{
    require_w_to_v(f, "translate_function");
    const Splitting& s = f.splitting();
    const int k = s.k();
    const int wd = s.w_dim();
    std::vector<double> phibar(k);
    if (!f.evaluate(wbar, phibar))
        throw std::out_of_range("translation base point is outside the active domain");

    const Point c = s.embed_v(phibar);
    const Point cinv = inverse(c);
    const Point left = multiply(s.embed_w(wbar), c);

    Grid grid = f.grid().centered();
    const std::size_t center = center_node(grid);
    std::vector<double> values(grid.size() * k, 0.0);
    std::vector<std::uint8_t> mask(grid.size(), 1);
    std::vector<double> x(wd), arg(wd), v(k), vn(k);
    TranslatedFunction out{SampledFunction(s, grid, f.orientation(), f.interpolation(),
                                           std::vector<double>(grid.size() * k, 0.0)),
                           0.0, 0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i == center)
            continue;
        grid.coords(i, x);
        const Point a = multiply(multiply(left, s.embed_w(x)), cinv);
        s.w_coords(a, arg);
        if (!f.evaluate(arg, v)) {
            mask[i] = 0;
            ++out.masked_nodes;
            continue;
        }
        for (int d = 0; d < k; ++d)
            values[i * k + d] = v[d] - phibar[d];
        if (f.evaluate(arg, vn, Interpolation::Nearest) && f.interpolation() == Interpolation::Multilinear)
            for (int d = 0; d < k; ++d)
                out.interpolation_error = std::max(out.interpolation_error, std::abs(v[d] - vn[d]));
    }
    out.function = SampledFunction(s, std::move(grid), f.orientation(), f.interpolation(), std::move(values),
                                   std::move(mask));
    return out;
}

TranslatedFunction translate_function(const SampledFunction& f, std::size_t base_node)
{
    if (base_node >= f.size() || !f.active(base_node))
        throw std::out_of_range("translation base node is not in the active domain");
    const auto w = f.grid().coords(base_node);
    return translate_function(f, w);
}

std::vector<double> graphmap_metric_lip_profile(const SampledFunction& g, const Metric& metric, std::size_t base_node,
                                                std::span<const double> radii)
{
    if (g.orientation() != Orientation::VtoW)
        throw std::invalid_argument("graphmap_metric_lip_profile needs a V -> W function");
    check_radii(radii);
    if (radii.empty())
        return {};
    if (base_node >= g.size() || !g.active(base_node))
        throw std::out_of_range("profile base node is not in the active domain");
    const double rmax = *std::max_element(radii.begin(), radii.end());
    const Point vinv = inverse(g.domain_point(base_node));
    const Point pinv = inverse(g.graph_point(base_node));
    std::vector<std::pair<double, double>> samples;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (j == base_node || !g.active(j))
            continue;
        const double d = norm(metric, multiply(vinv, g.domain_point(j)));
        if (!(d < rmax) || d == 0.0)
            continue;
        samples.emplace_back(d, norm(metric, multiply(pinv, g.graph_point(j))) / d);
    }
    return fold_profile(samples, radii);
}

}  // namespace hgraph
