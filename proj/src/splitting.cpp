#include "hgraph/splitting.hpp"

#include "hgraph/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hgraph {

namespace {

constexpr double kOrthonormalTol = 1e-10;
constexpr double kIsotropyTol = 1e-12;
constexpr double kRankTol = 1e-12;

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

void check_orthonormal(const Frame& f, int dim, const char* what)
{
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (static_cast<int>(f[i].size()) != dim)
            throw std::invalid_argument(std::string(what) + " vectors must have 2n components");
        for (double v : f[i])
            if (!std::isfinite(v))
                throw std::invalid_argument(std::string(what) + " has non-finite entries");
        for (std::size_t j = 0; j <= i; ++j) {
            const double expect = i == j ? 1.0 : 0.0;
            if (std::abs(dot(f[i], f[j]) - expect) > kOrthonormalTol)
                throw std::invalid_argument(std::string(what) + " is not orthonormal");
        }
    }
}

Frame orthogonal_complement(const Frame& v_frame, int dim)
{
    Frame basis = v_frame;
    Frame out;
    for (int e = 0; e < dim && static_cast<int>(basis.size()) < dim; ++e) {
        std::vector<double> u(dim, 0.0);
        u[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const double c = dot(u, b);
                for (int i = 0; i < dim; ++i)
                    u[i] -= c * b[i];
            }
        const double len = std::sqrt(dot(u, u));
        if (len < 1e-6)
            continue;
        for (double& v : u)
            v /= len;
        // Snap roundoff so the standard splitting yields exact unit vectors.
        for (double& v : u)
            if (std::abs(v) < 1e-15)
                v = 0.0;
        basis.push_back(u);
        out.push_back(u);
    }
    return out;
}

}  // namespace

Splitting Splitting::standard(int n, int k)
{
    if (n < 1 || n > kMaxN || k < 1 || k > n)
        throw std::invalid_argument("standard splitting needs 1 <= k <= n <= " + std::to_string(kMaxN));
    Frame v(k, std::vector<double>(2 * n, 0.0));
    for (int i = 0; i < k; ++i)
        v[i][i] = 1.0;
    Splitting s = from_frames(n, v);
    s.standard_ = true;
    return s;
}

Splitting Splitting::from_frames(int n, const Frame& v_frame, const std::optional<Frame>& w_frame)
{
    if (n < 1 || n > kMaxN)
        throw std::invalid_argument("group index n must be in [1, " + std::to_string(kMaxN) + "]");
    const int k = static_cast<int>(v_frame.size());
    if (k < 1 || k > n)
        throw std::invalid_argument("V must have dimension 1 <= k <= n");
    const int dim = 2 * n;
    check_orthonormal(v_frame, dim, "v_frame");
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(symplectic(v_frame[i], v_frame[j])) > kIsotropyTol)
                throw std::invalid_argument("v_frame is not isotropic: exp(span) is not a subgroup");

    Splitting s;
    s.n_ = n;
    s.k_ = k;
    s.v_frame_ = v_frame;
    if (w_frame) {
        if (static_cast<int>(w_frame->size()) != dim - k)
            throw std::invalid_argument("w_frame must have 2n - k vectors");
        check_orthonormal(*w_frame, dim, "w_frame");
        s.w_frame_ = *w_frame;
    } else {
        s.w_frame_ = orthogonal_complement(v_frame, dim);
    }
    s.finish();
    return s;
}

void Splitting::finish()
{
    const int dim = 2 * n_;
    Eigen::MatrixXd basis(dim, dim);
    for (int c = 0; c < k_; ++c)
        for (int r = 0; r < dim; ++r)
            basis(r, c) = v_frame_[c][r];
    for (int c = 0; c < dim - k_; ++c)
        for (int r = 0; r < dim; ++r)
            basis(r, k_ + c) = w_frame_[c][r];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis);
    if (svd.singularValues().minCoeff() < kRankTol)
        throw std::invalid_argument("span(v_frame) + span(w_frame) is not all of R^{2n}");
    const Eigen::MatrixXd inv = basis.inverse();
    dual_.resize(dim * dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            dual_[r * dim + c] = inv(r, c);
}

Point Splitting::embed_w(std::span<const double> coords) const
{
    if (static_cast<int>(coords.size()) != w_dim())
        throw std::invalid_argument("W coordinates must have 2n - k + 1 entries");
    Point p(n_);
    for (int j = 0; j < 2 * n_ - k_; ++j) {
        const double c = coords[j];
        if (c == 0.0)
            continue;
        const auto& g = w_frame_[j];
        for (int i = 0; i < 2 * n_; ++i)
            p.h(i) += c * g[i];
    }
    p.t() = coords[w_dim() - 1];
    return p;
}

Point Splitting::embed_v(std::span<const double> coords) const
{
    if (static_cast<int>(coords.size()) != k_)
        throw std::invalid_argument("V coordinates must have k entries");
    Point p(n_);
    for (int j = 0; j < k_; ++j) {
        const double c = coords[j];
        if (c == 0.0)
            continue;
        const auto& f = v_frame_[j];
        for (int i = 0; i < 2 * n_; ++i)
            p.h(i) += c * f[i];
    }
    return p;
}

void Splitting::w_coords(const Point& w, std::span<double> out) const
{
    const int dim = 2 * n_;
    for (int j = 0; j < dim - k_; ++j) {
        const double* row = dual_.data() + (k_ + j) * dim;
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            s += row[i] * w.h(i);
        out[j] = s;
    }
    out[dim - k_] = w.t();
}

std::vector<double> Splitting::w_coords(const Point& w) const
{
    std::vector<double> out(w_dim());
    w_coords(w, out);
    return out;
}

void Splitting::v_coords(const Point& p, std::span<double> out) const
{
    const int dim = 2 * n_;
    for (int j = 0; j < k_; ++j) {
        const double* row = dual_.data() + j * dim;
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            s += row[i] * p.h(i);
        out[j] = s;
    }
}

Components Splitting::project(const Point& p) const
{
    if (p.n() != n_)
        throw std::invalid_argument("point and splitting live in different groups");
    double c[kMaxN];
    v_coords(p, {c, static_cast<std::size_t>(k_)});
    Point v = embed_v({c, static_cast<std::size_t>(k_)});
    Point w = multiply(p, inverse(v));
    return {w, v};
}

Components Splitting::project_vw(const Point& p) const
{
    if (p.n() != n_)
        throw std::invalid_argument("point and splitting live in different groups");
    double c[kMaxN];
    v_coords(p, {c, static_cast<std::size_t>(k_)});
    Point v = embed_v({c, static_cast<std::size_t>(k_)});
    Point w = multiply(inverse(v), p);
    return {w, v};
}

bool cone_contains(const Metric& metric, const Cone& cone, const Point& q)
{
    if (cone.beta < 0.0)
        throw std::invalid_argument("cone opening must be nonnegative");
    const Point rel = multiply(inverse(cone.vertex), q);
    if (cone.base == ConeBase::W) {
        const Components c = cone.splitting.project(rel);
        return in_closed_cone(norm(metric, c.w), norm(metric, c.v), cone.beta);
    }
    const Components c = cone.splitting.project_vw(rel);
    return in_closed_cone(norm(metric, c.v), norm(metric, c.w), cone.beta);
}

double ProjectionIdentityReport::max_residual() const
{
    return std::max({pw_product, pv_product, pw_inverse, pv_inverse, reconstruction});
}

ProjectionIdentityReport projection_identities_at(const Splitting& s, const Point& p, const Point& q)
{
    ProjectionIdentityReport r;
    r.samples = 1;
    const Components cp = s.project(p);
    const Components cq = s.project(q);
    const Components cpq = s.project(multiply(p, q));
    const Components cpinv = s.project(inverse(p));
    const Point vinv = inverse(cp.v);

    r.pw_product = max_coord_diff(cpq.w, cp.w * cp.v * cq.w * vinv);
    r.pv_product = max_coord_diff(cpq.v, cp.v * cq.v);
    r.pw_inverse = max_coord_diff(cpinv.w, vinv * inverse(cp.w) * cp.v);
    r.pv_inverse = max_coord_diff(cpinv.v, vinv);
    r.reconstruction = max_coord_diff(p, cp.w * cp.v);
    return r;
}

ProjectionIdentityReport projection_identities_check(const Splitting& s, std::size_t samples, std::uint64_t seed)
{
    const CounterRng rng(seed, 0x7072);
    const int n = s.n();
    ProjectionIdentityReport total;
    std::vector<double> hp(2 * n), hq(2 * n);
    for (std::size_t i = 0; i < samples; ++i) {
        for (int d = 0; d < 2 * n; ++d) {
            hp[d] = rng.uniform(i, d, -5.0, 5.0);
            hq[d] = rng.uniform(i, 2 * n + 2 + d, -5.0, 5.0);
        }
        const Point p = Point::from_horizontal(hp, rng.uniform(i, 2 * n, -5.0, 5.0));
        const Point q = Point::from_horizontal(hq, rng.uniform(i, 2 * n + 1, -5.0, 5.0));
        const ProjectionIdentityReport r = projection_identities_at(s, p, q);
        total.pw_product = std::max(total.pw_product, r.pw_product);
        total.pv_product = std::max(total.pv_product, r.pv_product);
        total.pw_inverse = std::max(total.pw_inverse, r.pw_inverse);
        total.pv_inverse = std::max(total.pv_inverse, r.pv_inverse);
        total.reconstruction = std::max(total.reconstruction, r.reconstruction);
    }
    total.samples = samples;
    return total;
}

SplittingConstantReport norm_splitting_constant(const Splitting& s, const Metric& metric, std::size_t samples,
                                                std::uint64_t seed)
{
    const CounterRng rng(seed, 0x6e73);
    const int n = s.n();
    SplittingConstantReport r;
    r.c_tilde = std::numeric_limits<double>::infinity();
    r.max_right_excess = -std::numeric_limits<double>::infinity();
    std::vector<double> h(2 * n);
    for (std::size_t i = 0; i < samples; ++i) {
        for (int d = 0; d < 2 * n; ++d)
            h[d] = rng.uniform(i, d, -5.0, 5.0);
        const Point p = Point::from_horizontal(h, rng.uniform(i, 2 * n, -5.0, 5.0));
        const Components c = s.project(p);
        const double whole = norm(metric, p);
        const double parts = norm(metric, c.w) + norm(metric, c.v);
        if (parts > 0.0)
            r.c_tilde = std::min(r.c_tilde, whole / parts);
        const double excess = whole - parts;
        r.max_right_excess = std::max(r.max_right_excess, excess);
        if (excess > 1e-9)
            ++r.right_violations;
    }
    r.samples = samples;
    return r;
}

}  // namespace hgraph
