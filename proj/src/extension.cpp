#include "hgraph/extension.hpp"

#include "hgraph/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hgraph {

namespace {

constexpr double kEqualityTol = 1e-12;

void require_codim1(const Splitting& s)
{
    if (s.k() != 1)
        throw std::invalid_argument("codimension-one machinery needs k = 1, got k = " + std::to_string(s.k()));
}

// ||(p^{-1} . w)_W|| for p = u . c. The W-factor is c^{-1} (u^{-1} w) c, which
// only shifts t by w(h, c); this form is exactly 0 at w = u.
double w_gap(const Metric& metric, const Point& u_inv, const Point& c, const Point& w)
{
    Point q = multiply(u_inv, w);
    q.t() += symplectic(q.horizontal(), c.horizontal());
    return norm(metric, q);
}

double vertex_value(const Splitting& s, const Point& p)
{
    double c = 0.0;
    s.v_coords(p, {&c, 1});
    return c;
}

struct Apex {
    Point u_inv;
    Point c_point;
    double c;
};

Apex apex_of(const Splitting& s, const Point& p)
{
    const Components comp = s.project(p);
    return {inverse(comp.w), comp.v, vertex_value(s, p)};
}

}  // namespace

ConeBoundaryFn::ConeBoundaryFn(Splitting s, Point v, double b) : splitting(std::move(s)), vertex(v), beta(b)
{
    require_codim1(splitting);
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("cone opening beta must be positive");
    if (vertex.n() != splitting.n())
        throw std::invalid_argument("cone vertex lives in a different group");
    u = splitting.project(vertex).w;
    c = vertex_value(splitting, vertex);
}

ConeBoundaryFn ConeBoundaryFn::over(Splitting s, std::span<const double> w, double c, double beta)
{
    const Point u = s.embed_w(w);
    const double cv[] = {c};
    ConeBoundaryFn g(s, u * s.embed_v(cv), beta);
    g.u = u;
    g.c = c;
    return g;
}

double ConeBoundaryFn::upper(const Metric& metric, std::span<const double> w) const
{
    const double cv[] = {c};
    return c + w_gap(metric, inverse(u), splitting.embed_v(cv), splitting.embed_w(w)) / beta;
}

double ConeBoundaryFn::lower(const Metric& metric, std::span<const double> w) const
{
    const double cv[] = {c};
    return c - w_gap(metric, inverse(u), splitting.embed_v(cv), splitting.embed_w(w)) / beta;
}

double cone_boundary(const ConeBoundaryFn& gf, const Metric& metric, std::span<const double> w)
{
    return gf.upper(metric, w);
}

LipschitzViolation::LipschitzViolation(std::size_t f, std::size_t t, double r, double declared)
    : std::runtime_error("function is not " + std::to_string(declared) + "-Lipschitz on E: pair (" + std::to_string(f) +
                         ", " + std::to_string(t) + ") has ratio " + std::to_string(r)),
      from(f), to(t), ratio(r)
{
}

double upper_envelope(const Splitting& s, const Metric& metric, std::span<const Point> vertices, double L,
                      std::span<const double> w)
{
    require_codim1(s);
    const Point pw = s.embed_w(w);
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : vertices) {
        const Apex a = apex_of(s, p);
        best = std::min(best, a.c + L * w_gap(metric, a.u_inv, a.c_point, pw));
    }
    return best;
}

double lower_envelope(const Splitting& s, const Metric& metric, std::span<const Point> vertices, double L,
                      std::span<const double> w)
{
    require_codim1(s);
    const Point pw = s.embed_w(w);
    double best = -std::numeric_limits<double>::infinity();
    for (const Point& p : vertices) {
        const Apex a = apex_of(s, p);
        best = std::max(best, a.c - L * w_gap(metric, a.u_inv, a.c_point, pw));
    }
    return best;
}

ExtensionResult mcshane_extend(const SampledFunction& f, std::span<const std::uint8_t> subset, double L,
                               const Metric& metric, ScanOptions options)
{
    if (f.orientation() != Orientation::WtoV)
        throw std::invalid_argument("extension needs a W -> V function");
    const Splitting& s = f.splitting();
    require_codim1(s);
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("Lipschitz bound L must be positive");
    if (subset.size() != f.size())
        throw std::invalid_argument("subset mask size does not match the grid");

    std::vector<std::uint8_t> use(f.size(), 0);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (subset[i]) {
            if (!f.active(i))
                throw std::invalid_argument("subset contains a masked node");
            use[i] = 1;
            members.push_back(i);
        }
    if (members.empty())
        throw std::invalid_argument("extension needs a nonempty subset");

    LipschitzResult elip;
    if (members.size() >= 2) {
        elip = lipschitz_constant(f, metric, use, options);
        if (elip.infinite || elip.constant > L + kEqualityTol)
            throw LipschitzViolation(elip.from, elip.to, elip.constant, L);
    }

    std::vector<Apex> apexes;
    for (std::size_t i : members) {
        const double c = f.value(i)[0];
        apexes.push_back({inverse(f.domain_point(i)), s.embed_v({&c, 1}), c});
    }
    std::vector<double> up(f.size()), lo(f.size());
    parallel_for(f.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Point w = f.domain_point(i);
            double u = std::numeric_limits<double>::infinity();
            double l = -u;
            for (const Apex& a : apexes) {
                const double g = L * w_gap(metric, a.u_inv, a.c_point, w);
                u = std::min(u, a.c + g);
                l = std::max(l, a.c - g);
            }
            up[i] = u;
            lo[i] = l;
        }
    });

    ExtensionResult r{SampledFunction(s, f.grid(), Orientation::WtoV, f.interpolation(), up),
                      SampledFunction(s, f.grid(), Orientation::WtoV, f.interpolation(), lo),
                      use,
                      std::vector<std::uint8_t>(f.size(), 0),
                      elip,
                      {},
                      {},
                      L};
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.active(i)) {
            const double v = f.value(i)[0];
            r.equality_set[i] = std::abs(up[i] - v) <= kEqualityTol && std::abs(lo[i] - v) <= kEqualityTol;
        }
    if (f.size() >= 2) {
        r.upper_lip = lipschitz_constant(r.upper, metric, {}, options);
        r.lower_lip = lipschitz_constant(r.lower, metric, {}, options);
    }
    return r;
}

SandwichRecord sandwich_harness(const SampledFunction& psi, const SampledFunction& phi, const SampledFunction& eta,
                                const Metric& metric, std::size_t base_node, const DiffOptions& options)
{
    for (const SampledFunction* g : {&psi, &eta})
        if (!(g->grid() == phi.grid()) || !(g->splitting() == phi.splitting()) ||
            g->orientation() != Orientation::WtoV)
            throw std::invalid_argument("sandwich functions must share grid and splitting");
    require_codim1(phi.splitting());
    if (phi.orientation() != Orientation::WtoV)
        throw std::invalid_argument("sandwich functions must map W to V");
    if (base_node >= phi.size() || !psi.active(base_node) || !phi.active(base_node) || !eta.active(base_node))
        throw std::out_of_range("sandwich base node is not active in all three functions");
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!psi.active(i) || !phi.active(i) || !eta.active(i))
            continue;
        const double a = psi.value(i)[0], b = phi.value(i)[0], c = eta.value(i)[0];
        if (a > b + kEqualityTol || b > c + kEqualityTol)
            throw std::invalid_argument("sandwich order psi <= phi <= eta fails at node " + std::to_string(i));
    }
    const double b0 = phi.value(base_node)[0];
    if (std::abs(psi.value(base_node)[0] - b0) > kEqualityTol || std::abs(eta.value(base_node)[0] - b0) > kEqualityTol)
        throw std::invalid_argument("sandwich functions do not touch at the base point");

    SandwichRecord rec;
    rec.lower = estimate_differential(psi, metric, base_node, options);
    rec.middle = estimate_differential(phi, metric, base_node, options);
    rec.upper = estimate_differential(eta, metric, base_node, options);
    const Eigen::MatrixXd& ml = rec.lower.matrix;
    const Eigen::MatrixXd& mm = rec.middle.matrix;
    const Eigen::MatrixXd& mu = rec.upper.matrix;
    rec.bracket_gap = (ml - mu).norm();
    rec.band = rec.lower.residuals.back() + rec.upper.residuals.back();
    const Eigen::MatrixXd seg = mu - ml;
    const double len2 = seg.squaredNorm();
    double tpar = 0.0;
    if (len2 > 0.0)
        tpar = std::clamp((mm - ml).cwiseProduct(seg).sum() / len2, 0.0, 1.0);
    rec.middle_offset = (mm - (ml + tpar * seg)).norm();
    rec.bracket_ok = rec.bracket_gap < 2.0 * rec.band || rec.bracket_gap <= kExactResidual;
    rec.middle_in_band = rec.middle_offset <= rec.band + rec.middle.residuals.back() + kExactResidual;
    rec.violation = !(rec.bracket_ok && rec.middle_in_band);
    return rec;
}

}  // namespace hgraph
