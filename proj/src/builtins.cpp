#include "hgraph/builtins.hpp"

#include "hgraph/extension.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hgraph {

const std::vector<BuiltinInfo>& list_builtins()
{
    static const std::vector<BuiltinInfo> registry = {
        {"zero", "none", "phi = 0", "intrinsic 0-Lipschitz", "differentiable everywhere, differential 0", true, 0, 0},
        {"constant", "value: k reals", "phi = c", "intrinsic 0-Lipschitz",
         "differentiable everywhere, differential 0", true, 0, 0},
        {"intrinsic_linear", "matrix: k x (2n-k)", "phi(w) = M w_H; the graph is a homogeneous subgroup",
         "intrinsic Lipschitz; for n = k = 1 the constant is |m| under d_inf",
         "differentiable everywhere, differential M", true, 0, 0},
        {"vertical_coordinate", "none", "phi(y, t) = t",
         "intrinsic Lipschitz on bounded domains (ratio bounded by sqrt|t| terms)",
         "differentiable at 0 with differential 0", true, 1, 1},
        {"sqrt_cusp", "none", "phi(y, t) = |y|^(1/2)", "not intrinsic Lipschitz at y = 0 (ratio ~ |y|^(-1/2))",
         "not differentiable at 0", false, 1, 1},
        {"cone_boundary", "vertex: 2n+1 reals, beta > 0",
         "upper boundary of the positive cone C_beta^+(vertex)",
         "intrinsic Lipschitz with a constant depending on beta, larger than 1/beta (about 4.23 for beta = 1 under d_inf)",
         "differentiable away from the vertex fibre and the norm's singular set", true, 0, 1},
        {"bump_linear", "matrix: k x (2n-k), bump: real", "phi(w) = M w_H + s |w_H|^2 (each coordinate)",
         "intrinsic Lipschitz on bounded domains", "differentiable at 0 with differential M", true, 0, 0},
        {"polynomial", "polynomial: per V coordinate, list of {coef, powers}",
         "phi = polynomial in W coordinates", "depends on the expression", "depends on the expression", false, 0,
         0},
    };
    return registry;
}

const BuiltinInfo* find_builtin(std::string_view name)
{
    const auto& reg = list_builtins();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const BuiltinInfo& b) { return b.name == name; });
    return it == reg.end() ? nullptr : &*it;
}

namespace {

void check_finite(const std::vector<double>& v, const std::string& field)
{
    for (double x : v)
        if (!std::isfinite(x))
            throw ConfigError(field, "non-finite value");
}

std::vector<double> flat_matrix(const FunctionSpec& spec, const Splitting& s)
{
    const int k = s.k();
    const int h = s.w_horizontal_dim();
    if (static_cast<int>(spec.matrix.size()) != k)
        throw ConfigError("function.matrix", "expected " + std::to_string(k) + " rows");
    std::vector<double> m;
    for (const auto& row : spec.matrix) {
        if (static_cast<int>(row.size()) != h)
            throw ConfigError("function.matrix", "expected rows of length " + std::to_string(h));
        m.insert(m.end(), row.begin(), row.end());
    }
    check_finite(m, "function.matrix");
    return m;
}

}  // namespace

Evaluator make_function(const FunctionSpec& spec, const Splitting& s, const Metric& metric)
{
    const BuiltinInfo* info = find_builtin(spec.builtin);
    if (!info)
        throw ConfigError("function.builtin", "unknown builtin '" + spec.builtin + "'");
    if (info->required_n && s.n() != info->required_n)
        throw ConfigError("function.builtin", spec.builtin + " needs n = " + std::to_string(info->required_n));
    if (info->required_k && s.k() != info->required_k)
        throw ConfigError("function.builtin", spec.builtin + " needs k = " + std::to_string(info->required_k));
    const int k = s.k();
    const int h = s.w_horizontal_dim();
    const std::string& name = spec.builtin;

    if (name == "zero")
        return [k](std::span<const double>, std::span<double> out) { std::fill_n(out.begin(), k, 0.0); };
    if (name == "constant") {
        if (static_cast<int>(spec.value.size()) != k)
            throw ConfigError("function.value", "expected " + std::to_string(k) + " entries");
        check_finite(spec.value, "function.value");
        return [c = spec.value](std::span<const double>, std::span<double> out) {
            std::copy(c.begin(), c.end(), out.begin());
        };
    }
    if (name == "intrinsic_linear" || name == "bump_linear") {
        const std::vector<double> m = flat_matrix(spec, s);
        const double bump = name == "bump_linear" ? spec.bump : 0.0;
        if (!std::isfinite(bump))
            throw ConfigError("function.bump", "non-finite value");
        return [m, bump, k, h](std::span<const double> w, std::span<double> out) {
            double q = 0.0;
            for (int c = 0; c < h; ++c)
                q += w[c] * w[c];
            for (int r = 0; r < k; ++r) {
                double acc = 0.0;
                for (int c = 0; c < h; ++c)
                    acc += m[r * h + c] * w[c];
                out[r] = bump == 0.0 ? acc : acc + bump * q;
            }
        };
    }
    if (name == "vertical_coordinate")
        return [](std::span<const double> w, std::span<double> out) { out[0] = w[1]; };
    if (name == "sqrt_cusp")
        return [](std::span<const double> w, std::span<double> out) { out[0] = std::sqrt(std::abs(w[0])); };
    if (name == "cone_boundary") {
        const int n = s.n();
        if (static_cast<int>(spec.vertex.size()) != 2 * n + 1)
            throw ConfigError("function.vertex", "expected " + std::to_string(2 * n + 1) + " coordinates");
        check_finite(spec.vertex, "function.vertex");
        if (!(spec.beta > 0.0) || !std::isfinite(spec.beta))
            throw ConfigError("function.beta", "must be positive");
        const Point v = Point::from_horizontal(std::span<const double>(spec.vertex).first(2 * n), spec.vertex.back());
        ConeBoundaryFn gf(s, v, spec.beta);
        return [gf, metric](std::span<const double> w, std::span<double> out) { out[0] = gf.upper(metric, w); };
    }
    // polynomial
    const int wd = s.w_dim();
    if (static_cast<int>(spec.polynomial.size()) != k)
        throw ConfigError("function.polynomial", "expected one term list per V coordinate (" + std::to_string(k) + ")");
    for (const auto& terms : spec.polynomial)
        for (const Monomial& t : terms) {
            if (static_cast<int>(t.powers.size()) != wd)
                throw ConfigError("function.polynomial", "each term needs " + std::to_string(wd) + " exponents");
            if (!std::isfinite(t.coef))
                throw ConfigError("function.polynomial", "non-finite coefficient");
            for (int p : t.powers)
                if (p < 0)
                    throw ConfigError("function.polynomial", "negative exponent");
        }
    return [poly = spec.polynomial, wd](std::span<const double> w, std::span<double> out) {
        for (std::size_t r = 0; r < poly.size(); ++r) {
            double acc = 0.0;
            for (const Monomial& t : poly[r]) {
                double term = t.coef;
                for (int d = 0; d < wd; ++d)
                    for (int e = 0; e < t.powers[d]; ++e)
                        term *= w[d];
                acc += term;
            }
            out[r] = acc;
        }
    };
}

}  // namespace hgraph
