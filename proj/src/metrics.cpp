#include "hgraph/metrics.hpp"

#include "hgraph/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hgraph {

void CcParams::validate() const
{
    if (segments < 1 || restarts < 1 || iterations < 1)
        throw std::invalid_argument("cc parameters (segments, restarts, iterations) must be positive");
}

Metric Metric::carnot_caratheodory(CcParams params)
{
    params.validate();
    Metric m(MetricKind::CarnotCaratheodory);
    m.cc_ = params;
    return m;
}

Metric Metric::parse(std::string_view name)
{
    if (name == "infinity" || name == "inf")
        return infinity();
    if (name == "koranyi")
        return koranyi();
    if (name == "cc")
        return carnot_caratheodory();
    throw std::invalid_argument("unknown metric '" + std::string(name) + "' (expected infinity|koranyi|cc)");
}

std::string Metric::name() const
{
    switch (kind_) {
    case MetricKind::Infinity:
        return "infinity";
    case MetricKind::Koranyi:
        return "koranyi";
    case MetricKind::CarnotCaratheodory:
        return "cc";
    }
    return "?";
}

double infinity_norm(const Point& p)
{
    return std::max(p.horizontal_norm(), 2.0 * std::sqrt(std::abs(p.t())));
}

double koranyi_norm(const Point& p)
{
    double h2 = 0.0;
    for (int i = 0; i < p.horizontal_dim(); ++i)
        h2 += p.h(i) * p.h(i);
    return std::pow(h2 * h2 + 16.0 * p.t() * p.t(), 0.25);
}

double norm(const Metric& metric, const Point& p)
{
    switch (metric.kind()) {
    case MetricKind::Infinity:
        return infinity_norm(p);
    case MetricKind::Koranyi:
        return koranyi_norm(p);
    case MetricKind::CarnotCaratheodory:
        return cc_upper(p, metric.cc_params()).value;
    }
    return 0.0;
}

double distance(const Metric& metric, const Point& p, const Point& q)
{
    return norm(metric, multiply(inverse(p), q));
}

// ---------------------------------------------------------------------------
// Carnot-Caratheodory upper bound

namespace {

using Eigen::VectorXd;

// Control increments a_i = h_i / K packed as K blocks of D = 2n entries.
struct Polygon {
    int K;
    int D;
};

// J v = (v_y, -v_x), so that w(a, b) = <a, J b>.
inline void apply_j(const double* v, double* out, int D)
{
    const int n = D / 2;
    for (int i = 0; i < n; ++i) {
        out[i] = v[n + i];
        out[n + i] = -v[i];
    }
}

void endpoint(const Polygon& g, const VectorXd& a, VectorXd& total, double& t)
{
    total.setZero(g.D);
    t = 0.0;
    for (int i = 0; i < g.K; ++i) {
        const double* ai = a.data() + i * g.D;
        t += 0.5 * symplectic({total.data(), static_cast<std::size_t>(g.D)}, {ai, static_cast<std::size_t>(g.D)});
        for (int d = 0; d < g.D; ++d)
            total[d] += ai[d];
    }
}

// Gradient of t with respect to every block: (1/2) J (T - 2 S_i - a_i).
void t_gradient(const Polygon& g, const VectorXd& a, const VectorXd& total, VectorXd& grad)
{
    grad.resize(g.K * g.D);
    VectorXd prefix = VectorXd::Zero(g.D);
    VectorXd tmp(g.D);
    for (int i = 0; i < g.K; ++i) {
        const double* ai = a.data() + i * g.D;
        for (int d = 0; d < g.D; ++d)
            tmp[d] = 0.5 * (total[d] - 2.0 * prefix[d] - ai[d]);
        apply_j(tmp.data(), grad.data() + i * g.D, g.D);
        for (int d = 0; d < g.D; ++d)
            prefix[d] += ai[d];
    }
}

double true_cost(const Polygon& g, const VectorXd& a)
{
    double c = 0.0;
    for (int i = 0; i < g.K; ++i)
        c += a.segment(i * g.D, g.D).norm();
    return c;
}

struct Target {
    VectorXd h;
    double t;
};

double endpoint_error(const Polygon& g, const VectorXd& a, const Target& target)
{
    VectorXd total;
    double t;
    endpoint(g, a, total, t);
    return std::max((total - target.h).cwiseAbs().maxCoeff(), std::abs(t - target.t));
}

double penalty_objective(const Polygon& g, const VectorXd& a, const Target& target, double mu, double eps,
                         VectorXd* grad)
{
    VectorXd total;
    double t;
    endpoint(g, a, total, t);
    const VectorXd dh = total - target.h;
    const double dt = t - target.t;
    double f = mu * (dh.squaredNorm() + dt * dt);
    for (int i = 0; i < g.K; ++i)
        f += std::sqrt(a.segment(i * g.D, g.D).squaredNorm() + eps * eps);
    if (grad) {
        VectorXd tg;
        t_gradient(g, a, total, tg);
        grad->resize(a.size());
        for (int i = 0; i < g.K; ++i) {
            const auto ai = a.segment(i * g.D, g.D);
            const double len = std::sqrt(ai.squaredNorm() + eps * eps);
            grad->segment(i * g.D, g.D) = ai / len + 2.0 * mu * (dh + dt * tg.segment(i * g.D, g.D));
        }
    }
    return f;
}

// Penalty descent with Barzilai-Borwein steps and an Armijo safeguard.
void penalty_descent(const Polygon& g, VectorXd& a, const Target& target, int iterations)
{
    constexpr double kMu[3] = {1e2, 1e4, 1e6};
    constexpr double kEps[3] = {1e-3, 1e-5, 1e-7};
    for (int round = 0; round < 3; ++round) {
        VectorXd grad;
        double f = penalty_objective(g, a, target, kMu[round], kEps[round], &grad);
        double step = 1.0 / (1.0 + 2.0 * kMu[round]);
        for (int it = 0; it < iterations; ++it) {
            const double gnorm2 = grad.squaredNorm();
            if (gnorm2 < 1e-28)
                break;
            VectorXd trial;
            double ft = 0.0;
            double s = step;
            bool accepted = false;
            for (int bt = 0; bt < 40; ++bt) {
                trial = a - s * grad;
                ft = penalty_objective(g, trial, target, kMu[round], kEps[round], nullptr);
                if (ft <= f - 1e-4 * s * gnorm2) {
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if (!accepted)
                break;
            VectorXd new_grad;
            penalty_objective(g, trial, target, kMu[round], kEps[round], &new_grad);
            const VectorXd sv = trial - a;
            const VectorXd yv = new_grad - grad;
            const double sy = sv.dot(yv);
            step = sy > 0.0 ? std::clamp(sv.squaredNorm() / sy, 1e-12, 1e6) : s * 2.0;
            a = std::move(trial);
            grad = std::move(new_grad);
            f = ft;
        }
    }
}

// Gauss-Newton with least-norm steps onto {endpoint(a) = target}.
void project_onto_endpoint(const Polygon& g, VectorXd& a, const Target& target)
{
    const int m = g.D + 1;
    for (int it = 0; it < 40; ++it) {
        VectorXd total;
        double t;
        endpoint(g, a, total, t);
        VectorXd c(m);
        c.head(g.D) = total - target.h;
        c[g.D] = t - target.t;
        if (c.cwiseAbs().maxCoeff() <= 1e-14)
            return;
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, g.K * g.D);
        VectorXd tg;
        t_gradient(g, a, total, tg);
        for (int i = 0; i < g.K; ++i) {
            jac.block(0, i * g.D, g.D, g.D).setIdentity();
            jac.block(g.D, i * g.D, 1, g.D) = tg.segment(i * g.D, g.D).transpose();
        }
        const VectorXd delta = jac.completeOrthogonalDecomposition().solve(-c);
        if (!delta.allFinite())
            return;
        a += delta;
    }
}

// Newton steps on the KKT system of min sum |a_i| subject to endpoint(a) = target,
// each followed by re-projection; a step is kept only if it lowers the cost.
void polish(const Polygon& g, VectorXd& a, const Target& target)
{
    const int N = g.K * g.D;
    const int m = g.D + 1;
    const int n = g.D / 2;
    for (int it = 0; it < 60; ++it) {
        VectorXd total;
        double t;
        endpoint(g, a, total, t);
        VectorXd tg;
        t_gradient(g, a, total, tg);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, N);
        VectorXd grad(N);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
        for (int i = 0; i < g.K; ++i) {
            const auto ai = a.segment(i * g.D, g.D);
            const double len = ai.norm();
            if (len < 1e-12)
                return;
            const VectorXd u = ai / len;
            grad.segment(i * g.D, g.D) = u;
            H.block(i * g.D, i * g.D, g.D, g.D) =
                (Eigen::MatrixXd::Identity(g.D, g.D) - u * u.transpose()) / len;
            jac.block(0, i * g.D, g.D, g.D).setIdentity();
            jac.block(g.D, i * g.D, 1, g.D) = tg.segment(i * g.D, g.D).transpose();
        }
        const VectorXd lambda = jac.transpose().completeOrthogonalDecomposition().solve(-grad);
        // Hessian of t: blocks Omega / 2 above the diagonal, Omega^T / 2 below.
        Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(g.D, g.D);
        for (int d = 0; d < n; ++d) {
            omega(d, n + d) = 1.0;
            omega(n + d, d) = -1.0;
        }
        for (int i = 0; i < g.K; ++i)
            for (int j = i + 1; j < g.K; ++j) {
                H.block(i * g.D, j * g.D, g.D, g.D) += 0.5 * lambda[g.D] * omega;
                H.block(j * g.D, i * g.D, g.D, g.D) += 0.5 * lambda[g.D] * omega.transpose();
            }
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(N + m, N + m);
        kkt.topLeftCorner(N, N) = H;
        kkt.topRightCorner(N, m) = jac.transpose();
        kkt.bottomLeftCorner(m, N) = jac;
        VectorXd rhs(N + m);
        rhs.head(N) = -(grad + jac.transpose() * lambda);
        rhs[N + g.D] = -(t - target.t);
        rhs.segment(N, g.D) = -(total - target.h);
        const VectorXd step = kkt.completeOrthogonalDecomposition().solve(rhs);
        if (!step.allFinite())
            return;
        const double cost = true_cost(g, a);
        bool improved = false;
        double scale = 1.0;
        for (int bt = 0; bt < 12 && !improved; ++bt, scale *= 0.5) {
            VectorXd trial = a + scale * step.head(N);
            project_onto_endpoint(g, trial, target);
            if (endpoint_error(g, trial, target) <= kCcEndpointTol && true_cost(g, trial) < cost) {
                improved = cost - true_cost(g, trial) > 1e-15 * cost;
                a = std::move(trial);
                if (!improved)
                    return;
            }
        }
        if (!improved)
            return;
    }
}

struct Candidate {
    VectorXd a;
    double cost = std::numeric_limits<double>::infinity();
    double error = std::numeric_limits<double>::infinity();
    bool certified = false;
};

bool better(const Candidate& x, const Candidate& y)
{
    if (x.certified != y.certified)
        return x.certified;
    return x.cost < y.cost;
}

Candidate evaluate(const Polygon& g, VectorXd a, const Target& target)
{
    Candidate c;
    c.error = endpoint_error(g, a, target);
    c.certified = c.error <= kCcEndpointTol;
    c.cost = true_cost(g, a);
    c.a = std::move(a);
    return c;
}

Candidate optimize_from(const Polygon& g, VectorXd a, const Target& target, int iterations)
{
    penalty_descent(g, a, target, iterations);
    project_onto_endpoint(g, a, target);
    if (endpoint_error(g, a, target) <= kCcEndpointTol)
        polish(g, a, target);
    return evaluate(g, std::move(a), target);
}

VectorXd deterministic_start(const Polygon& g, const Target& target)
{
    VectorXd a(g.K * g.D);
    double radius = 0.0;
    if (g.K >= 3)
        radius = std::sqrt(4.0 * std::abs(target.t) * std::tan(std::numbers::pi / g.K) / g.K);
    const double orientation = target.t >= 0.0 ? 1.0 : -1.0;
    const int n = g.D / 2;
    for (int i = 0; i < g.K; ++i) {
        const double theta = orientation * 2.0 * std::numbers::pi * i / g.K;
        for (int d = 0; d < g.D; ++d)
            a[i * g.D + d] = target.h[d] / g.K;
        a[i * g.D + 0] += radius * std::cos(theta);
        a[i * g.D + n] += radius * std::sin(theta);
    }
    return a;
}

VectorXd random_start(const Polygon& g, const Target& target, const CounterRng& rng, int restart)
{
    VectorXd a(g.K * g.D);
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.K));
    for (int i = 0; i < g.K; ++i)
        for (int d = 0; d < g.D; ++d) {
            const auto counter = static_cast<std::uint64_t>((restart * g.K + i) * g.D + d);
            a[i * g.D + d] = target.h[d] / g.K + scale * rng.normal(counter);
        }
    return a;
}

Candidate best_for_segments(const Polygon& g, const Target& target, const CcParams& params, const Candidate* seed)
{
    Candidate best;
    auto consider = [&](Candidate c) {
        if (better(c, best))
            best = std::move(c);
    };
    if (seed) {
        // The (K-1)-optimum padded with a null segment is itself a K-segment control.
        VectorXd padded = VectorXd::Zero(g.K * g.D);
        padded.head(seed->a.size()) = seed->a;
        consider(evaluate(g, std::move(padded), target));
    }
    const CounterRng rng(params.seed, static_cast<std::uint64_t>(g.K));
    for (int r = 0; r < params.restarts; ++r) {
        VectorXd start = r == 0 ? deterministic_start(g, target) : random_start(g, target, rng, r);
        consider(optimize_from(g, std::move(start), target, params.iterations));
    }
    return best;
}

}  // namespace

CcResult cc_upper(const Point& p, const CcParams& params)
{
    params.validate();
    CcResult result;
    const double scale = infinity_norm(p);
    if (scale == 0.0) {
        result.certified = true;
        return result;
    }
    const Point unit = dilate(1.0 / scale, p);
    const int D = p.horizontal_dim();
    Target target{VectorXd(D), unit.t()};
    for (int d = 0; d < D; ++d)
        target.h[d] = unit.h(d);

    Candidate previous;
    bool have_previous = false;
    for (int K = 1; K <= params.segments; ++K) {
        Candidate c = best_for_segments({K, D}, target, params, have_previous ? &previous : nullptr);
        previous = std::move(c);
        have_previous = true;
    }

    const int K = params.segments;
    result.value = scale * previous.cost;
    result.certified = previous.certified;
    result.endpoint_error = previous.error;
    for (int i = 0; i < K; ++i) {
        ControlSegment seg;
        seg.duration = 1.0 / K;
        seg.h.resize(D);
        for (int d = 0; d < D; ++d)
            seg.h[d] = scale * K * previous.a[i * D + d];
        result.control.segments.push_back(std::move(seg));
    }
    return result;
}

EquivalenceConstants equivalence_constants(const Metric& first, const Metric& second, int n, std::size_t samples,
                                           std::uint64_t seed)
{
    if (samples < 1)
        throw std::invalid_argument("equivalence_constants needs at least one sample");
    const CounterRng rng(seed, 0x6571);
    EquivalenceConstants out{std::numeric_limits<double>::infinity(), 0.0};
    std::vector<double> h(2 * n);
    for (std::size_t s = 0; s < samples; ++s) {
        for (int d = 0; d < 2 * n; ++d)
            h[d] = rng.normal(s, d);
        Point p = Point::from_horizontal(h, rng.normal(s, 2 * n));
        const double n1 = norm(first, p);
        if (n1 == 0.0)
            continue;
        p = dilate(1.0 / n1, p);
        const double ratio = norm(second, p) / norm(first, p);
        out.c_low = std::min(out.c_low, ratio);
        out.c_high = std::max(out.c_high, ratio);
    }
    return out;
}

}  // namespace hgraph
