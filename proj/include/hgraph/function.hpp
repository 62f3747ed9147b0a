#pragma once

// Functions between complementary subgroups sampled on axis-aligned grids.

#include "hgraph/group.hpp"
#include "hgraph/splitting.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace hgraph {

struct Axis {
    double min = 0.0;
    double max = 1.0;
    int count = 2;

    double step() const { return (max - min) / (count - 1); }
    double node(int i) const { return i == count - 1 ? max : min + i * step(); }

    bool operator==(const Axis&) const = default;
};

/// Tensor grid; node indices are row-major with the last axis fastest.
class Grid {
public:
    Grid() = default;
    explicit Grid(std::vector<Axis> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    std::size_t size() const { return size_; }
    const std::vector<Axis>& axes() const { return axes_; }

    void coords(std::size_t index, std::span<double> out) const;
    std::vector<double> coords(std::size_t index) const;
    void multi_index(std::size_t index, std::span<int> out) const;
    std::size_t index(std::span<const int> multi) const;

    /// Fractional position of x along axis a, snapped to the nearest integer
    /// when within 1e-9; nullopt when outside [min, max].
    std::optional<double> position(int a, double x) const;

    std::optional<std::size_t> nearest(std::span<const double> x) const;

    /// Same spacing and (odd) node count, symmetric about 0 so that the origin
    /// is a node. Returns the grid unchanged when it already has that shape.
    Grid centered() const;

    bool operator==(const Grid& o) const { return axes_ == o.axes_; }

private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

enum class Interpolation { Nearest, Multilinear };
enum class Orientation {
    WtoV,  ///< phi: A in W -> V, graph points w . phi(w)
    VtoW   ///< phi: A in V -> W, graph points v . phi(v)
};

using Evaluator = std::function<void(std::span<const double> in, std::span<double> out)>;

class SampledFunction {
public:
    SampledFunction(Splitting splitting, Grid grid, Orientation orientation, Interpolation interpolation,
                    std::vector<double> values, std::vector<std::uint8_t> mask = {});

    /// Samples `eval` at every grid node. Nodes where the mask is 0 are left at 0.
    static SampledFunction sample(Splitting splitting, Grid grid, const Evaluator& eval,
                                  Interpolation interpolation = Interpolation::Multilinear,
                                  Orientation orientation = Orientation::WtoV, std::vector<std::uint8_t> mask = {});

    const Splitting& splitting() const { return splitting_; }
    const Grid& grid() const { return grid_; }
    Orientation orientation() const { return orientation_; }
    Interpolation interpolation() const { return interpolation_; }

    int domain_dim() const { return grid_.dim(); }
    int value_dim() const { return value_dim_; }
    std::size_t size() const { return grid_.size(); }

    bool active(std::size_t i) const { return mask_[i] != 0; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::size_t active_count() const;

    std::span<const double> value(std::size_t i) const
    {
        return {values_.data() + i * value_dim_, static_cast<std::size_t>(value_dim_)};
    }
    const std::vector<double>& values() const { return values_; }

    /// Interpolated value at arbitrary domain coordinates; false outside the
    /// grid or when a contributing node is masked out.
    bool evaluate(std::span<const double> x, std::span<double> out) const
    {
        return evaluate(x, out, interpolation_);
    }
    bool evaluate(std::span<const double> x, std::span<double> out, Interpolation how) const;

    /// The domain point at node i (in W or V depending on orientation).
    Point domain_point(std::size_t i) const;
    Point embed_domain(std::span<const double> x) const;
    Point embed_value(std::span<const double> v) const;

    /// w . phi(w) (or v . phi(v)); throws std::out_of_range on masked nodes.
    Point graph_point(std::size_t i) const;
    Point graph_point(std::span<const double> x) const;

    /// Projects a point of H^n onto the domain / value factor (domain first).
    Components decompose(const Point& p) const;

private:
    Splitting splitting_;
    Grid grid_;
    Orientation orientation_;
    Interpolation interpolation_;
    int value_dim_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

}  // namespace hgraph
