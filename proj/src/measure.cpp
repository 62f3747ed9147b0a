#include "hgraph/measure.hpp"

#include "hgraph/parallel.hpp"
#include "hgraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hgraph {

namespace {

// Fraction of the box half-width beyond which a hit means the box may clip the set.
constexpr double kEdgeFraction = 0.9;

// Sampling box in W coordinates, clipped to the grid. Edge hits are only
// meaningful on sides that were not clipped.
struct Box {
    std::vector<double> lo, hi;
    std::vector<double> edge_lo, edge_hi;  ///< -inf / +inf on clipped sides

    double volume() const
    {
        double v = 1.0;
        for (std::size_t d = 0; d < lo.size(); ++d)
            v *= std::max(0.0, hi[d] - lo[d]);
        return v;
    }
};

Box make_box(const Grid& g, const std::vector<double>& center, const std::vector<double>& half)
{
    Box b;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < center.size(); ++d) {
        const Axis& a = g.axes()[d];
        const double lo = center[d] - half[d], hi = center[d] + half[d];
        b.lo.push_back(std::max(lo, a.min));
        b.hi.push_back(std::min(hi, a.max));
        b.edge_lo.push_back(lo >= a.min ? center[d] - kEdgeFraction * half[d] : -inf);
        b.edge_hi.push_back(hi <= a.max ? center[d] + kEdgeFraction * half[d] : inf);
    }
    return b;
}

// Half-widths of a box in W coordinates containing the preimage of B(p, r) when
// V-components are controlled by the horizontal norm: |w_H - u_H| <= 2r and the
// t-offset is bounded through the conjugation by c and the product with u.
void preimage_box(const Splitting& s, const Point& p, double r, std::vector<double>& center, std::vector<double>& half)
{
    const Components c = s.project(p);
    center = s.w_coords(c.w);
    const int h = s.w_horizontal_dim();
    const double kappa = 2.0;
    half.assign(h, kappa * r);
    const double cnorm = c.v.horizontal_norm();
    const double unorm = c.w.horizontal_norm();
    half.push_back((kappa * r) * (kappa * r) / 4.0 + kappa * r * cnorm + 0.5 * unorm * kappa * r);
}

struct Counts {
    std::size_t hits = 0;
    std::size_t edge = 0;
    std::size_t in_e = 0;
};

Counts sample_box(const SampledFunction& f, const Metric& metric, const Point& pinv, double r, const Box& box,
                  const MeasureOptions& opt, std::span<const std::uint8_t> e_mask)
{
    const int wd = f.domain_dim();
    const CounterRng rng(opt.seed, 0x6d73);
    const unsigned threads = opt.threads == 0 ? default_threads() : opt.threads;
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads, opt.samples));
    std::vector<Counts> parts(chunks);
    const std::size_t per = (opt.samples + chunks - 1) / chunks;
    parallel_for(chunks, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> w(wd), v(f.value_dim());
        for (std::size_t ch = begin; ch < end; ++ch) {
            Counts& cnt = parts[ch];
            const std::size_t lo = ch * per;
            const std::size_t hi = std::min(opt.samples, lo + per);
            for (std::size_t i = lo; i < hi; ++i) {
                for (int d = 0; d < wd; ++d)
                    w[d] = rng.uniform(i, d, box.lo[d], box.hi[d]);
                if (!f.evaluate(w, v))
                    continue;
                const Point q = multiply(f.embed_domain(w), f.embed_value(v));
                if (!(norm(metric, multiply(pinv, q)) < r))
                    continue;
                ++cnt.hits;
                for (int d = 0; d < wd; ++d)
                    if (w[d] < box.edge_lo[d] || w[d] > box.edge_hi[d]) {
                        ++cnt.edge;
                        break;
                    }
                if (!e_mask.empty()) {
                    const auto node = f.grid().nearest(w);
                    if (node && e_mask[*node])
                        ++cnt.in_e;
                }
            }
        }
    });
    Counts total;
    for (const Counts& c : parts) {
        total.hits += c.hits;
        total.edge += c.edge;
        total.in_e += c.in_e;
    }
    return total;
}

struct Sampled {
    MeasureEstimate est;
    Counts counts;
};

Sampled measure_ball(const SampledFunction& f, const Metric& metric, const Point& p, double r,
                     const MeasureOptions& opt, std::span<const std::uint8_t> e_mask)
{
    if (f.orientation() != Orientation::WtoV)
        throw std::invalid_argument("pushforward measure needs a W -> V function");
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("ball radius must be positive");
    if (opt.samples == 0)
        throw std::invalid_argument("sample count must be positive");
    if (p.n() != f.splitting().n())
        throw std::invalid_argument("ball center lives in a different group");
    const Point pinv = inverse(p);
    std::vector<double> center, half;
    preimage_box(f.splitting(), p, r, center, half);
    Box box = make_box(f.grid(), center, half);
    Counts c;
    if (box.volume() > 0.0)
        c = sample_box(f, metric, pinv, r, box, opt, e_mask);
    bool enlarged = false;
    if (c.edge > 0) {
        for (double& h : half)
            h *= 2.0;
        box = make_box(f.grid(), center, half);
        enlarged = true;
        c = sample_box(f, metric, pinv, r, box, opt, e_mask);
        if (c.edge > 0)
            throw std::runtime_error("sampling box does not cover the ball preimage at radius " + std::to_string(r));
    }
    Sampled s;
    s.counts = c;
    MeasureEstimate& e = s.est;
    e.center = p;
    e.radius = r;
    e.samples = opt.samples;
    e.hits = c.hits;
    e.box_volume = box.volume();
    const double frac = static_cast<double>(c.hits) / static_cast<double>(opt.samples);
    e.estimate = e.box_volume * frac;
    e.stderr_ = e.box_volume * std::sqrt(frac * (1.0 - frac) / static_cast<double>(opt.samples));
    e.enlarged = enlarged;
    return s;
}

}  // namespace

MeasureEstimate pushforward_ball_measure(const SampledFunction& f, const Metric& metric, const Point& p, double r,
                                         const MeasureOptions& options)
{
    return measure_ball(f, metric, p, r, options, {}).est;
}

AhlforsProfile ahlfors_profile(const SampledFunction& f, const Metric& metric, const Point& p,
                               std::span<const double> radii, const MeasureOptions& options)
{
    if (radii.empty())
        throw std::invalid_argument("Ahlfors profile needs at least one radius");
    const int exponent = homogeneous_dimension(f.splitting().n()) - f.splitting().k();
    AhlforsProfile a;
    a.radii.assign(radii.begin(), radii.end());
    a.min_ratio = std::numeric_limits<double>::infinity();
    a.max_ratio = 0.0;
    for (double r : radii) {
        const MeasureEstimate e = pushforward_ball_measure(f, metric, p, r, options);
        const double scale = std::pow(2.0 * r, exponent);
        a.estimates.push_back(e);
        a.ratios.push_back(e.estimate / scale);
        a.ratio_stderr.push_back(e.stderr_ / scale);
        a.min_ratio = std::min(a.min_ratio, a.ratios.back());
        a.max_ratio = std::max(a.max_ratio, a.ratios.back());
    }
    return a;
}

DensityProfile density_profile(std::span<const std::uint8_t> e_mask, const SampledFunction& f, const Metric& metric,
                               const Point& p, std::span<const double> radii, const MeasureOptions& options)
{
    if (e_mask.size() != f.size())
        throw std::invalid_argument("E mask size does not match the grid");
    DensityProfile d;
    d.radii.assign(radii.begin(), radii.end());
    for (double r : radii) {
        const Sampled s = measure_ball(f, metric, p, r, options, e_mask);
        if (s.counts.hits == 0) {
            d.density.push_back(0.0);
            d.skipped.push_back(1);
            continue;
        }
        d.density.push_back(static_cast<double>(s.counts.in_e) / static_cast<double>(s.counts.hits));
        d.skipped.push_back(0);
    }
    return d;
}

}  // namespace hgraph
