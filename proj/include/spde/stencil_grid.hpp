#pragma once

// Periodic grids, integer stencils and difference operators on them.
//
// Every grid here is a uniform lattice on the torus [0,L_1) x ... x [0,L_d)
// with the same spacing h along each axis, so that a shift by h*lambda for an
// integer offset lambda is again a grid point.  Values are stored row-major
// (last axis fastest).

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

/// Integer offset vector in Z^d.
using Offset = std::vector<int>;

/// Tuple (lambda_1, ..., lambda_p) of stencil offsets; empty means identity.
using MultiIndexOffset = std::vector<Offset>;

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Finite ordered set of offsets containing the origin exactly once, first.
class Stencil {
public:
    /// Throws GridError unless offsets[0] is the zero vector, offsets are
    /// distinct and all have length `dimension`.
    Stencil(int dimension, std::vector<Offset> offsets);

    /// {0, e_1, ..., e_d}.
    static Stencil coordinate(int dimension);

    int dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return offsets_.size(); }
    const Offset& operator[](std::size_t k) const { return offsets_[k]; }
    const std::vector<Offset>& offsets() const noexcept { return offsets_; }

    std::optional<std::size_t> index_of(const Offset& offset) const;
    bool contains(const Offset& offset) const { return index_of(offset).has_value(); }

    /// True when the nonzero offsets are exactly e_1, ..., e_d in order.
    bool is_coordinate() const;

    bool operator==(const Stencil&) const = default;

private:
    int dim_;
    std::vector<Offset> offsets_;
};

bool is_zero(const Offset& offset);

class TorusGrid {
public:
    /// Uniform grid with the same side length and point count on every axis.
    TorusGrid(int dimension, double side_length, std::size_t points_per_axis);

    /// Per-axis description; spacing side[a]/counts[a] must agree on all axes.
    TorusGrid(std::vector<double> side_lengths, std::vector<std::size_t> counts);

    int dimension() const noexcept { return static_cast<int>(counts_.size()); }
    double spacing() const noexcept { return side_[0] / static_cast<double>(counts_[0]); }
    double side_length(int axis) const { return side_.at(static_cast<std::size_t>(axis)); }
    std::size_t count(int axis) const { return counts_.at(static_cast<std::size_t>(axis)); }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    const std::vector<double>& side_lengths() const noexcept { return side_; }
    std::size_t point_count() const noexcept { return total_; }

    /// Multi-index of a flat index, and back.
    std::vector<std::size_t> unflatten(std::size_t flat) const;
    std::size_t flatten(std::span<const std::size_t> index) const;

    /// Physical coordinates of a point.
    std::vector<double> coordinates(std::size_t flat) const;

    /// Flat index of the point reached from `flat` by moving `steps * offset`
    /// grid cells, wrapping periodically.
    std::size_t shifted(std::size_t flat, const Offset& offset, int steps = 1) const;

    /// Grid with every per-axis count multiplied by 2^j.
    TorusGrid refined(unsigned j) const;

    bool operator==(const TorusGrid& other) const;

private:
    std::vector<double> side_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> strides_;
    std::size_t total_;
};

/// Real values sampled at every point of a TorusGrid.
class GridFunction {
public:
    explicit GridFunction(TorusGrid grid, double fill = 0.0);
    GridFunction(TorusGrid grid, std::vector<double> values);

    template <class F>
    static GridFunction sample(const TorusGrid& grid, F&& fn) {
        std::vector<double> values(grid.point_count());
        for (std::size_t p = 0; p < values.size(); ++p) {
            const auto x = grid.coordinates(p);
            values[p] = fn(std::span<const double>(x));
        }
        return GridFunction(grid, std::move(values));
    }

    const TorusGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t p) const { return values_[p]; }
    double& operator[](std::size_t p) { return values_[p]; }

    bool all_finite() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double scale);
    /// this += scale * other
    GridFunction& axpy(double scale, const GridFunction& other);

private:
    void require_same_grid(const GridFunction& other) const;

    TorusGrid grid_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction lhs, const GridFunction& rhs);
GridFunction operator-(GridFunction lhs, const GridFunction& rhs);
GridFunction operator*(double scale, GridFunction f);
/// Pointwise product.
GridFunction operator*(const GridFunction& lhs, const GridFunction& rhs);

/// (f(x + h*lambda) - f(x)) / h with periodic wraparound; identity for lambda = 0.
/// |h_signed| must equal the grid spacing; its sign selects forward or backward.
GridFunction diff(const GridFunction& f, const Stencil& stencil, const Offset& lambda,
                  double h_signed);

/// delta_{h,lambda_1} ... delta_{h,lambda_p} f; identity for the empty tuple.
GridFunction composite_diff(const GridFunction& f, const Stencil& stencil,
                            const MultiIndexOffset& lambdas, double h_signed);

/// Translation (T_{h,mu} f)(x) = f(x + h*mu).
GridFunction shift(const GridFunction& f, const Offset& mu, int sign = 1);

/// sqrt(h^d * sum_x f(x)^2)
double l2_grid_norm(const GridFunction& f);

double sup_grid_norm(const GridFunction& f);

/// Pure difference part of the discrete Sobolev norm: the square root of the
/// sum over all r-tuples from the stencil of the squared l2 norms of the
/// corresponding composite differences.
double difference_sobolev_norm(const GridFunction& f, const Stencil& stencil, unsigned r);

/// Samples a function given on the grid refined by 2^j at the coarse points.
GridFunction restrict_to_coarser(const GridFunction& fine, unsigned j);

/// Whether |h_signed| matches the grid spacing to rounding.
bool matches_spacing(const TorusGrid& grid, double h_signed);

}  // namespace spde
