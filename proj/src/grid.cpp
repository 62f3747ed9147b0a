#include "hgraph/function.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hgraph {

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes))
{
    if (axes_.empty())
        throw std::invalid_argument("grid needs at least one axis");
    strides_.assign(axes_.size(), 1);
    size_ = 1;
    for (std::size_t a = axes_.size(); a-- > 0;) {
        const Axis& ax = axes_[a];
        if (ax.count < 2)
            throw std::invalid_argument("grid axis " + std::to_string(a) + " needs at least 2 nodes");
        if (!std::isfinite(ax.min) || !std::isfinite(ax.max) || !(ax.min < ax.max))
            throw std::invalid_argument("grid axis " + std::to_string(a) + " needs finite min < max");
        strides_[a] = size_;
        size_ *= static_cast<std::size_t>(ax.count);
    }
}

void Grid::multi_index(std::size_t index, std::span<int> out) const
{
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        out[a] = static_cast<int>(index / strides_[a]);
        index %= strides_[a];
    }
}

std::size_t Grid::index(std::span<const int> multi) const
{
    std::size_t idx = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a)
        idx += static_cast<std::size_t>(multi[a]) * strides_[a];
    return idx;
}

void Grid::coords(std::size_t index, std::span<double> out) const
{
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const int i = static_cast<int>(index / strides_[a]);
        index %= strides_[a];
        out[a] = axes_[a].node(i);
    }
}

std::vector<double> Grid::coords(std::size_t index) const
{
    std::vector<double> c(axes_.size());
    coords(index, c);
    return c;
}

std::optional<double> Grid::position(int a, double x) const
{
    const Axis& ax = axes_[a];
    double u = (x - ax.min) / ax.step();
    const double r = std::round(u);
    if (std::abs(u - r) <= 1e-9)
        u = r;
    if (!(u >= 0.0 && u <= ax.count - 1))
        return std::nullopt;
    return u;
}

std::optional<std::size_t> Grid::nearest(std::span<const double> x) const
{
    std::size_t idx = 0;
    for (int a = 0; a < dim(); ++a) {
        const auto u = position(a, x[a]);
        if (!u)
            return std::nullopt;
        idx += static_cast<std::size_t>(std::lround(*u)) * strides_[a];
    }
    return idx;
}

Grid Grid::centered() const
{
    std::vector<Axis> out;
    bool same = true;
    for (const Axis& ax : axes_) {
        if (ax.count % 2 == 1 && ax.min == -ax.max) {
            out.push_back(ax);
            continue;
        }
        same = false;
        const int m = (ax.count - 1) / 2;
        const double half = m * ax.step();
        out.push_back({-half, half, 2 * m + 1});
    }
    if (same)
        return *this;
    return Grid(std::move(out));
}

// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(Splitting splitting, Grid grid, Orientation orientation, Interpolation interpolation,
                                 std::vector<double> values, std::vector<std::uint8_t> mask)
    : splitting_(std::move(splitting)), grid_(std::move(grid)), orientation_(orientation),
      interpolation_(interpolation), values_(std::move(values)), mask_(std::move(mask))
{
    const int domain = orientation_ == Orientation::WtoV ? splitting_.w_dim() : splitting_.k();
    value_dim_ = orientation_ == Orientation::WtoV ? splitting_.k() : splitting_.w_dim();
    if (grid_.dim() != domain)
        throw std::invalid_argument("grid dimension " + std::to_string(grid_.dim()) +
                                    " does not match the domain dimension " + std::to_string(domain));
    if (mask_.empty())
        mask_.assign(grid_.size(), 1);
    if (mask_.size() != grid_.size())
        throw std::invalid_argument("mask size does not match the grid");
    if (values_.size() != grid_.size() * value_dim_)
        throw std::invalid_argument("value array size does not match the grid");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!mask_[i])
            continue;
        for (int c = 0; c < value_dim_; ++c)
            if (!std::isfinite(values_[i * value_dim_ + c]))
                throw std::invalid_argument("non-finite function value at node " + std::to_string(i));
    }
}

SampledFunction SampledFunction::sample(Splitting splitting, Grid grid, const Evaluator& eval,
                                        Interpolation interpolation, Orientation orientation,
                                        std::vector<std::uint8_t> mask)
{
    const int vdim = orientation == Orientation::WtoV ? splitting.k() : splitting.w_dim();
    std::vector<double> values(grid.size() * vdim, 0.0);
    if (mask.empty())
        mask.assign(grid.size(), 1);
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i < mask.size() && !mask[i])
            continue;
        grid.coords(i, x);
        eval(x, {values.data() + i * vdim, static_cast<std::size_t>(vdim)});
    }
    return SampledFunction(std::move(splitting), std::move(grid), orientation, interpolation, std::move(values),
                           std::move(mask));
}

std::size_t SampledFunction::active_count() const
{
    std::size_t c = 0;
    for (auto m : mask_)
        c += m != 0;
    return c;
}

bool SampledFunction::evaluate(std::span<const double> x, std::span<double> out, Interpolation how) const
{
    const int D = grid_.dim();
    if (static_cast<int>(x.size()) != D)
        throw std::invalid_argument("evaluation point has the wrong dimension");
    int base[32];
    double frac[32];
    int moving[32];
    int n_moving = 0;
    for (int a = 0; a < D; ++a) {
        const auto u = grid_.position(a, x[a]);
        if (!u)
            return false;
        if (how == Interpolation::Nearest) {
            base[a] = static_cast<int>(std::lround(*u));
            frac[a] = 0.0;
            continue;
        }
        const double fl = std::floor(*u);
        base[a] = static_cast<int>(fl);
        frac[a] = *u - fl;
        if (base[a] == grid_.axes()[a].count - 1 && frac[a] == 0.0)
            continue;
        if (frac[a] > 0.0)
            moving[n_moving++] = a;
    }
    for (int c = 0; c < value_dim_; ++c)
        out[c] = 0.0;
    const std::size_t corners = std::size_t{1} << n_moving;
    int idx[32];
    for (std::size_t corner = 0; corner < corners; ++corner) {
        double weight = 1.0;
        for (int a = 0; a < D; ++a)
            idx[a] = base[a];
        for (int m = 0; m < n_moving; ++m) {
            const int a = moving[m];
            if (corner & (std::size_t{1} << m)) {
                idx[a] += 1;
                weight *= frac[a];
            } else {
                weight *= 1.0 - frac[a];
            }
        }
        const std::size_t node = grid_.index({idx, static_cast<std::size_t>(D)});
        if (!mask_[node])
            return false;
        const double* v = values_.data() + node * value_dim_;
        for (int c = 0; c < value_dim_; ++c)
            out[c] += weight * v[c];
    }
    return true;
}

Point SampledFunction::embed_domain(std::span<const double> x) const
{
    return orientation_ == Orientation::WtoV ? splitting_.embed_w(x) : splitting_.embed_v(x);
}

Point SampledFunction::embed_value(std::span<const double> v) const
{
    return orientation_ == Orientation::WtoV ? splitting_.embed_v(v) : splitting_.embed_w(v);
}

Point SampledFunction::domain_point(std::size_t i) const
{
    double x[32];
    grid_.coords(i, {x, static_cast<std::size_t>(grid_.dim())});
    return embed_domain({x, static_cast<std::size_t>(grid_.dim())});
}

Point SampledFunction::graph_point(std::size_t i) const
{
    if (i >= size() || !mask_[i])
        throw std::out_of_range("graph point requested at a masked or missing node");
    return multiply(domain_point(i), embed_value(value(i)));
}

Point SampledFunction::graph_point(std::span<const double> x) const
{
    double v[32];
    const std::span<double> out{v, static_cast<std::size_t>(value_dim_)};
    if (!evaluate(x, out))
        throw std::out_of_range("graph point requested outside the active domain");
    return multiply(embed_domain(x), embed_value(out));
}

Components SampledFunction::decompose(const Point& p) const
{
    if (orientation_ == Orientation::WtoV)
        return splitting_.project(p);
    // Domain V first: p = v . w. Components keeps the W factor in `.w`.
    return splitting_.project_vw(p);
}

}  // namespace hgraph
