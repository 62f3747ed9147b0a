#pragma once

// Heisenberg group H^n in exponential coordinates (x, y, t).
//
// The group law is
//   (x, y, t) . (x', y', t') = (x + x', y + y', t + t' + <x, y'>/2 - <x', y>/2)
// and the intrinsic dilations are delta_l(x, y, t) = (l x, l y, l^2 t).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace hgraph {

/// Largest supported group index n.
inline constexpr int kMaxN = 8;

/// A point of H^n. Horizontal coordinates are stored as h = (x_1..x_n, y_1..y_n).
class Point {
public:
    Point() = default;

    /// The identity of H^n.
    explicit Point(int n);

    Point(std::span<const double> x, std::span<const double> y, double t);

    /// Builds a point from the packed horizontal vector h = (x, y).
    static Point from_horizontal(std::span<const double> h, double t);

    int n() const { return n_; }
    int horizontal_dim() const { return 2 * n_; }

    double x(int i) const { return h_[i]; }
    double y(int i) const { return h_[n_ + i]; }
    double h(int i) const { return h_[i]; }
    double t() const { return t_; }

    double& x(int i) { return h_[i]; }
    double& y(int i) { return h_[n_ + i]; }
    double& h(int i) { return h_[i]; }
    double& t() { return t_; }

    std::span<const double> horizontal() const { return {h_.data(), static_cast<std::size_t>(2 * n_)}; }
    std::span<double> horizontal() { return {h_.data(), static_cast<std::size_t>(2 * n_)}; }

    /// Euclidean length of the horizontal part |(x, y)|.
    double horizontal_norm() const;

    bool is_finite() const;

    /// Flattened coordinates (x, y, t).
    std::vector<double> coords() const;

    bool operator==(const Point& o) const;

private:
    int n_ = 1;
    std::array<double, 2 * kMaxN> h_{};
    double t_ = 0.0;
};

/// Standard symplectic form w(a, b) = <a_x, b_y> - <b_x, a_y> on packed horizontal vectors.
double symplectic(std::span<const double> a, std::span<const double> b);

Point multiply(const Point& p, const Point& q);
Point inverse(const Point& p);
Point dilate(double lambda, const Point& p);

inline Point operator*(const Point& p, const Point& q) { return multiply(p, q); }

/// Largest absolute coordinate difference; both points must live in the same H^n.
double max_coord_diff(const Point& p, const Point& q);

/// Homogeneous dimension Q = 2n + 2.
int homogeneous_dimension(int n);

struct ControlSegment {
    std::vector<double> h;  ///< 2n components, coefficients of X_1..X_n, Y_1..Y_n
    double duration = 0.0;
};

/// Piecewise-constant horizontal control.
struct HorizontalControl {
    std::vector<ControlSegment> segments;

    /// Throws std::invalid_argument unless every segment has 2n finite
    /// components and a finite nonnegative duration.
    void validate(int n) const;

    double total_duration() const;

    /// L^1-in-time cost: sum of |h| * duration.
    double cost() const;
};

/// Endpoint of the horizontal curve driven by `c` starting at `p`. Each segment
/// with constant control h and duration s is a one-parameter subgroup, so the
/// endpoint is p . (s h, 0) . (s' h', 0) ...
Point flow_horizontal(const Point& p, const HorizontalControl& c);

/// Axis-aligned coordinate box [lo, hi] in R^{2n+1}.
struct CoordinateBox {
    Point lo;
    Point hi;

    double volume() const;
};

/// Image of a box under an intrinsic dilation (again a coordinate box).
CoordinateBox dilate(double lambda, const CoordinateBox& box);

}  // namespace hgraph
