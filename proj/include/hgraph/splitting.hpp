#pragma once

// Complementary subgroups H^n = W . V with V horizontal of dimension k and W
// vertical (normal, containing the t-axis).
//
// V = exp(span(v_frame)) and W = exp(span(w_frame) + t-axis). Points of V carry
// k coordinates (coefficients along v_frame); points of W carry 2n - k + 1
// coordinates (coefficients along w_frame, then t).

#include "hgraph/group.hpp"
#include "hgraph/metrics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hgraph {

using Frame = std::vector<std::vector<double>>;

struct Components {
    Point w;
    Point v;
};

class Splitting {
public:
    /// V = span{X_1..X_k}; W horizontal part ordered (x_{k+1}..x_n, y_1..y_n).
    static Splitting standard(int n, int k);

    /// General isotropic V. When `w_frame` is absent the Euclidean-orthogonal
    /// complement is built by Gram-Schmidt over the coordinate basis.
    static Splitting from_frames(int n, const Frame& v_frame, const std::optional<Frame>& w_frame = std::nullopt);

    int n() const { return n_; }
    int k() const { return k_; }
    /// Number of w_frame vectors, 2n - k.
    int w_horizontal_dim() const { return 2 * n_ - k_; }
    /// Number of W coordinates, 2n - k + 1.
    int w_dim() const { return 2 * n_ - k_ + 1; }

    const Frame& v_frame() const { return v_frame_; }
    const Frame& w_frame() const { return w_frame_; }
    bool is_standard() const { return standard_; }
    /// Row-major 2n x 2n matrix taking a horizontal vector to its coefficients
    /// in (v_frame, w_frame).
    std::span<const double> dual() const { return dual_; }

    /// W coordinates (w_frame coefficients..., t) to a point of W.
    Point embed_w(std::span<const double> coords) const;
    /// V coordinates to a point of V.
    Point embed_v(std::span<const double> coords) const;

    /// Coordinates of a point known to lie in W.
    void w_coords(const Point& w, std::span<double> out) const;
    std::vector<double> w_coords(const Point& w) const;

    /// Coefficients of the V-component of p (linear in the horizontal part).
    void v_coords(const Point& p, std::span<double> out) const;

    /// p = p_W . p_V.
    Components project(const Point& p) const;

    /// p = v . w (V taken first); used when V is the domain of a function.
    Components project_vw(const Point& p) const;

    bool operator==(const Splitting& o) const
    {
        return n_ == o.n_ && k_ == o.k_ && v_frame_ == o.v_frame_ && w_frame_ == o.w_frame_;
    }

private:
    Splitting() = default;
    void finish();

    int n_ = 1;
    int k_ = 1;
    bool standard_ = false;
    Frame v_frame_;
    Frame w_frame_;
    // Row r gives the r-th coefficient of a horizontal vector in the basis
    // (v_frame, w_frame): rows 0..k-1 are V coefficients, the rest W coefficients.
    std::vector<double> dual_;
};

/// Which factor plays the role of the cone base.
enum class ConeBase { W, V };

/// Intrinsic cone C(vertex, beta) = vertex . {q : ||q_base|| <= beta ||q_axis||}.
/// With base W the decomposition is q = q_W . q_V; with base V it is q = q_V . q_W.
struct Cone {
    Splitting splitting;
    Point vertex;
    double beta = 0.0;
    ConeBase base = ConeBase::W;
};

/// Additive slack so that boundary points are inside the closed cone.
inline constexpr double kConeSlack = 1e-12;

inline bool in_closed_cone(double base_norm, double axis_norm, double beta)
{
    return base_norm <= beta * axis_norm + kConeSlack;
}

bool cone_contains(const Metric& metric, const Cone& cone, const Point& q);

struct ProjectionIdentityReport {
    double pw_product = 0.0;   ///< P_W(pq) vs P_W(p) P_V(p) P_W(q) P_V(p)^{-1}
    double pv_product = 0.0;   ///< P_V(pq) vs P_V(p) P_V(q)
    double pw_inverse = 0.0;   ///< P_W(p^{-1}) vs P_V(p)^{-1} P_W(p)^{-1} P_V(p)
    double pv_inverse = 0.0;   ///< P_V(p^{-1}) vs P_V(p)^{-1}
    double reconstruction = 0.0;  ///< p vs P_W(p) P_V(p)
    std::size_t samples = 0;

    double max_residual() const;
};

/// Evaluates the projection identities on random pairs with coordinates in [-5, 5].
ProjectionIdentityReport projection_identities_check(const Splitting& s, std::size_t samples, std::uint64_t seed);

/// Evaluates the identities on one explicit pair.
ProjectionIdentityReport projection_identities_at(const Splitting& s, const Point& p, const Point& q);

struct SplittingConstantReport {
    double c_tilde = 0.0;             ///< min over samples of ||p|| / (||p_W|| + ||p_V||)
    double max_right_excess = 0.0;    ///< max of ||p|| - (||p_W|| + ||p_V||)
    std::size_t right_violations = 0; ///< samples where the excess is above 1e-9
    std::size_t samples = 0;
};

SplittingConstantReport norm_splitting_constant(const Splitting& s, const Metric& metric, std::size_t samples,
                                                std::uint64_t seed);

}  // namespace hgraph
