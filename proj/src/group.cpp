#include "hgraph/group.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hgraph {

namespace {

void check_n(int n)
{
    if (n < 1 || n > kMaxN)
        throw std::invalid_argument("group index n must be in [1, " + std::to_string(kMaxN) + "], got " +
                                    std::to_string(n));
}

void check_same(const Point& p, const Point& q)
{
    if (p.n() != q.n())
        throw std::invalid_argument("dimension mismatch: H^" + std::to_string(p.n()) + " vs H^" +
                                    std::to_string(q.n()));
}

}  // namespace

Point::Point(int n) : n_(n)
{
    check_n(n);
}

Point::Point(std::span<const double> x, std::span<const double> y, double t) : n_(static_cast<int>(x.size())), t_(t)
{
    check_n(n_);
    if (y.size() != x.size())
        throw std::invalid_argument("x and y must have the same length");
    std::copy(x.begin(), x.end(), h_.begin());
    std::copy(y.begin(), y.end(), h_.begin() + n_);
    if (!is_finite())
        throw std::invalid_argument("point coordinates must be finite");
}

Point Point::from_horizontal(std::span<const double> h, double t)
{
    if (h.size() % 2 != 0)
        throw std::invalid_argument("horizontal vector must have even length");
    Point p(static_cast<int>(h.size() / 2));
    std::copy(h.begin(), h.end(), p.h_.begin());
    p.t_ = t;
    if (!p.is_finite())
        throw std::invalid_argument("point coordinates must be finite");
    return p;
}

double Point::horizontal_norm() const
{
    double s = 0.0;
    for (int i = 0; i < 2 * n_; ++i)
        s += h_[i] * h_[i];
    return std::sqrt(s);
}

bool Point::is_finite() const
{
    for (int i = 0; i < 2 * n_; ++i)
        if (!std::isfinite(h_[i]))
            return false;
    return std::isfinite(t_);
}

std::vector<double> Point::coords() const
{
    std::vector<double> c(h_.begin(), h_.begin() + 2 * n_);
    c.push_back(t_);
    return c;
}

bool Point::operator==(const Point& o) const
{
    if (n_ != o.n_ || t_ != o.t_)
        return false;
    return std::equal(h_.begin(), h_.begin() + 2 * n_, o.h_.begin());
}

double symplectic(std::span<const double> a, std::span<const double> b)
{
    const std::size_t n = a.size() / 2;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * b[n + i] - b[i] * a[n + i];
    return s;
}

Point multiply(const Point& p, const Point& q)
{
    check_same(p, q);
    const int n = p.n();
    Point r(n);
    double twist = 0.0;
    for (int i = 0; i < n; ++i) {
        r.x(i) = p.x(i) + q.x(i);
        r.y(i) = p.y(i) + q.y(i);
        twist += p.x(i) * q.y(i) - q.x(i) * p.y(i);
    }
    r.t() = p.t() + q.t() + 0.5 * twist;
    return r;
}

Point inverse(const Point& p)
{
    Point r(p.n());
    for (int i = 0; i < 2 * p.n(); ++i)
        r.h(i) = -p.h(i);
    r.t() = -p.t();
    return r;
}

Point dilate(double lambda, const Point& p)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("dilation factor must be positive and finite");
    Point r(p.n());
    for (int i = 0; i < 2 * p.n(); ++i)
        r.h(i) = lambda * p.h(i);
    r.t() = lambda * lambda * p.t();
    return r;
}

double max_coord_diff(const Point& p, const Point& q)
{
    check_same(p, q);
    double m = std::abs(p.t() - q.t());
    for (int i = 0; i < 2 * p.n(); ++i)
        m = std::max(m, std::abs(p.h(i) - q.h(i)));
    return m;
}

int homogeneous_dimension(int n)
{
    check_n(n);
    return 2 * n + 2;
}

void HorizontalControl::validate(int n) const
{
    for (const auto& s : segments) {
        if (static_cast<int>(s.h.size()) != 2 * n)
            throw std::invalid_argument("control segment must have 2n components");
        if (!std::isfinite(s.duration) || s.duration < 0.0)
            throw std::invalid_argument("control durations must be finite and nonnegative");
        for (double v : s.h)
            if (!std::isfinite(v))
                throw std::invalid_argument("control components must be finite");
    }
}

double HorizontalControl::total_duration() const
{
    double s = 0.0;
    for (const auto& seg : segments)
        s += seg.duration;
    return s;
}

double HorizontalControl::cost() const
{
    double c = 0.0;
    for (const auto& seg : segments) {
        double s = 0.0;
        for (double v : seg.h)
            s += v * v;
        c += std::sqrt(s) * seg.duration;
    }
    return c;
}

Point flow_horizontal(const Point& p, const HorizontalControl& c)
{
    c.validate(p.n());
    Point q = p;
    std::vector<double> step(2 * p.n());
    for (const auto& seg : c.segments) {
        for (int i = 0; i < 2 * p.n(); ++i)
            step[i] = seg.duration * seg.h[i];
        q = multiply(q, Point::from_horizontal(step, 0.0));
    }
    return q;
}

double CoordinateBox::volume() const
{
    check_same(lo, hi);
    double v = hi.t() - lo.t();
    for (int i = 0; i < 2 * lo.n(); ++i)
        v *= hi.h(i) - lo.h(i);
    return v;
}

CoordinateBox dilate(double lambda, const CoordinateBox& box)
{
    return {dilate(lambda, box.lo), dilate(lambda, box.hi)};
}

}  // namespace hgraph
