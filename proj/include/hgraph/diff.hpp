#pragma once

// Intrinsic linear maps and intrinsic differentials of sampled functions.

#include "hgraph/function.hpp"
#include "hgraph/graph.hpp"
#include "hgraph/metrics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hgraph {

/// phi(w) = M w_H with M a k x (2n - k) matrix. w_H are the w_frame
/// coefficients of w, i.e. W coordinates without t.
struct IntrinsicLinearMap {
    Splitting splitting;
    Eigen::MatrixXd matrix;

    IntrinsicLinearMap(Splitting s, Eigen::MatrixXd m);

    std::vector<double> apply(std::span<const double> w) const;
    Point graph_point(std::span<const double> w) const;
};

std::vector<double> linear_apply(const IntrinsicLinearMap& map, std::span<const double> w);

/// Max deviation from the graph of products and dilations of random graph points.
double linear_closure_residual(const IntrinsicLinearMap& map, std::size_t samples, std::uint64_t seed);

enum class Verdict { Consistent, Inconclusive, Fails };

const char* verdict_name(Verdict v);

struct DiffOptions {
    std::vector<double> radii;  ///< strictly decreasing; empty = default_radii
    double tol = 0.05;          ///< final residual must fall below this
    double decay = 1.5;         ///< required first / final residual ratio
};

/// Residuals at or below this count as exact representability.
inline constexpr double kExactResidual = 1e-9;

struct DiffEstimate {
    std::vector<double> base;  ///< W coordinates of wbar
    Eigen::MatrixXd matrix;    ///< fit at the smallest radius
    std::vector<double> radii;
    std::vector<double> residuals;
    std::vector<Eigen::MatrixXd> fits;
    std::vector<std::size_t> ball_sizes;
    Verdict verdict = Verdict::Inconclusive;
    std::string diagnostic;
    double interpolation_error = 0.0;
};

/// Radii halving from half the smallest horizontal half-extent: at least two,
/// at most four, and none below profile_floor_radius after the first two.
std::vector<double> default_radii(const SampledFunction& f);

/// Translates f to wbar and fits phi_wbar(w) ~ M w_H over shrinking W-balls by
/// least squares with weights 1 / ||w||^2. Throws std::domain_error when the
/// largest ball is not covered by active nodes.
DiffEstimate estimate_differential(const SampledFunction& f, const Metric& metric, std::span<const double> wbar,
                                   const DiffOptions& options = {});
DiffEstimate estimate_differential(const SampledFunction& f, const Metric& metric, std::size_t base_node,
                                   const DiffOptions& options = {});

/// The same fit for a function already centered at its base point (phi(0) = 0).
DiffEstimate fit_at_origin(const SampledFunction& centered, const Metric& metric, const DiffOptions& options);

/// T = graph of an intrinsic linear map, a vertical subgroup complementary to V.
class TangentSubgroup {
public:
    TangentSubgroup(Splitting s, Eigen::MatrixXd m);

    const Splitting& splitting() const { return splitting_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    /// w . M w_H for W coordinates w.
    Point element(std::span<const double> w) const;

    /// p = tau . v with tau in T and v in V; returned as {tau, v}.
    Components decompose(const Point& p) const;

    /// Distance of p from T measured by the V-factor of its decomposition.
    double defect(const Point& p) const;

private:
    Splitting splitting_;
    Eigen::MatrixXd matrix_;
};

/// Validates homogeneity and complementarity on random samples; throws
/// std::runtime_error when a check fails.
TangentSubgroup tangent_subgroup(const DiffEstimate& e, const Splitting& s, std::uint64_t seed = 1);

struct ConeRadius {
    double alpha = 0.0;
    std::optional<double> radius;  ///< none when even the nearest node violates
    bool full_grid = false;        ///< no violating node anywhere on the grid
};

/// For each alpha, the largest grid radius r such that no other graph point over
/// B_W(wbar, r) lies in the closed cone with base T, axis V and opening alpha.
std::vector<ConeRadius> verify_cone_characterization(const SampledFunction& f, const Metric& metric,
                                                     std::size_t base_node, const TangentSubgroup& t,
                                                     std::span<const double> alphas);

/// delta_{1/lambda}(Phi(vbar)^{-1} Phi(vbar . delta_lambda v)) for a V -> W function.
std::optional<Point> pansu_quotient(const SampledFunction& g, std::span<const double> vbar,
                                    std::span<const double> v, double lambda);

struct PansuSchedule {
    std::vector<double> lambdas;
    std::vector<std::optional<Point>> quotients;
    double max_gap = 0.0;    ///< max coordinate change between consecutive defined quotients
    double final_gap = 0.0;  ///< change between the last two defined quotients
};

PansuSchedule pansu_schedule(const SampledFunction& g, std::span<const double> vbar, std::span<const double> v,
                             std::span<const double> lambdas);

}  // namespace hgraph
