#include "spde/stencil_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace spde {

bool is_zero(const Offset& offset) {
    return std::all_of(offset.begin(), offset.end(), [](int c) { return c == 0; });
}

Stencil::Stencil(int dimension, std::vector<Offset> offsets)
    : dim_(dimension), offsets_(std::move(offsets)) {
    if (dim_ < 1)
        throw GridError("stencil dimension must be at least 1");
    if (offsets_.empty() || !is_zero(offsets_.front()))
        throw GridError("stencil must list the zero offset first");
    std::set<Offset> seen;
    for (const auto& o : offsets_) {
        if (static_cast<int>(o.size()) != dim_)
            throw GridError("stencil offset has wrong dimension");
        if (!seen.insert(o).second)
            throw GridError("duplicate stencil offset");
    }
}

Stencil Stencil::coordinate(int dimension) {
    std::vector<Offset> offsets;
    offsets.emplace_back(static_cast<std::size_t>(std::max(dimension, 1)), 0);
    for (int a = 0; a < dimension; ++a) {
        Offset e(static_cast<std::size_t>(dimension), 0);
        e[static_cast<std::size_t>(a)] = 1;
        offsets.push_back(std::move(e));
    }
    return Stencil(dimension, std::move(offsets));
}

std::optional<std::size_t> Stencil::index_of(const Offset& offset) const {
    const auto it = std::find(offsets_.begin(), offsets_.end(), offset);
    if (it == offsets_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - offsets_.begin());
}

bool Stencil::is_coordinate() const { return *this == coordinate(dim_); }

// ---------------------------------------------------------------------------

TorusGrid::TorusGrid(int dimension, double side_length, std::size_t points_per_axis)
    : TorusGrid(std::vector<double>(static_cast<std::size_t>(std::max(dimension, 0)), side_length),
                std::vector<std::size_t>(static_cast<std::size_t>(std::max(dimension, 0)),
                                         points_per_axis)) {}

TorusGrid::TorusGrid(std::vector<double> side_lengths, std::vector<std::size_t> counts)
    : side_(std::move(side_lengths)), counts_(std::move(counts)) {
    if (counts_.empty() || side_.size() != counts_.size())
        throw GridError("grid needs matching side lengths and counts for d >= 1 axes");
    for (std::size_t a = 0; a < counts_.size(); ++a) {
        if (!(side_[a] > 0.0) || !std::isfinite(side_[a]))
            throw GridError("grid side length must be positive and finite");
        if (counts_[a] == 0)
            throw GridError("grid needs at least one point per axis");
    }
    const double h = spacing();
    for (std::size_t a = 1; a < counts_.size(); ++a) {
        const double ha = side_[a] / static_cast<double>(counts_[a]);
        if (std::abs(ha - h) > 1e-12 * h)
            throw GridError("grid spacing must agree on all axes");
    }
    strides_.assign(counts_.size(), 1);
    for (std::size_t a = counts_.size() - 1; a > 0; --a)
        strides_[a - 1] = strides_[a] * counts_[a];
    total_ = strides_[0] * counts_[0];
}

std::vector<std::size_t> TorusGrid::unflatten(std::size_t flat) const {
    std::vector<std::size_t> index(counts_.size());
    for (std::size_t a = 0; a < counts_.size(); ++a) {
        index[a] = flat / strides_[a];
        flat %= strides_[a];
    }
    return index;
}

std::size_t TorusGrid::flatten(std::span<const std::size_t> index) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < counts_.size(); ++a)
        flat += index[a] * strides_[a];
    return flat;
}

std::vector<double> TorusGrid::coordinates(std::size_t flat) const {
    const double h = spacing();
    std::vector<double> x(counts_.size());
    for (std::size_t a = 0; a < counts_.size(); ++a) {
        x[a] = h * static_cast<double>(flat / strides_[a]);
        flat %= strides_[a];
    }
    return x;
}

std::size_t TorusGrid::shifted(std::size_t flat, const Offset& offset, int steps) const {
    std::size_t out = 0;
    for (std::size_t a = 0; a < counts_.size(); ++a) {
        const auto n = static_cast<long long>(counts_[a]);
        const auto i = static_cast<long long>(flat / strides_[a]);
        flat %= strides_[a];
        long long j = (i + static_cast<long long>(steps) * offset[a]) % n;
        if (j < 0)
            j += n;
        out += static_cast<std::size_t>(j) * strides_[a];
    }
    return out;
}

TorusGrid TorusGrid::refined(unsigned j) const {
    auto counts = counts_;
    for (auto& c : counts)
        c <<= j;
    return TorusGrid(side_, std::move(counts));
}

bool TorusGrid::operator==(const TorusGrid& other) const {
    if (counts_ != other.counts_)
        return false;
    for (std::size_t a = 0; a < side_.size(); ++a)
        if (std::abs(side_[a] - other.side_[a]) > 1e-12 * side_[a])
            return false;
    return true;
}

bool matches_spacing(const TorusGrid& grid, double h_signed) {
    const double h = grid.spacing();
    return std::abs(std::abs(h_signed) - h) <= 1e-12 * h;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(TorusGrid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.point_count(), fill) {}

GridFunction::GridFunction(TorusGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.point_count())
        throw GridError("value count does not match grid point count");
}

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void GridFunction::require_same_grid(const GridFunction& other) const {
    if (!(grid_ == other.grid_))
        throw GridError("grid functions live on different grids");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    return axpy(1.0, other);
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    return axpy(-1.0, other);
}

GridFunction& GridFunction::operator*=(double scale) {
    for (auto& v : values_)
        v *= scale;
    return *this;
}

GridFunction& GridFunction::axpy(double scale, const GridFunction& other) {
    require_same_grid(other);
    for (std::size_t p = 0; p < values_.size(); ++p)
        values_[p] += scale * other.values_[p];
    return *this;
}

GridFunction operator+(GridFunction lhs, const GridFunction& rhs) { return lhs += rhs; }
GridFunction operator-(GridFunction lhs, const GridFunction& rhs) { return lhs -= rhs; }
GridFunction operator*(double scale, GridFunction f) { return f *= scale; }

GridFunction operator*(const GridFunction& lhs, const GridFunction& rhs) {
    if (!(lhs.grid() == rhs.grid()))
        throw GridError("grid functions live on different grids");
    GridFunction out(lhs.grid());
    for (std::size_t p = 0; p < out.size(); ++p)
        out[p] = lhs[p] * rhs[p];
    return out;
}

// ---------------------------------------------------------------------------

GridFunction shift(const GridFunction& f, const Offset& mu, int sign) {
    const auto& grid = f.grid();
    if (static_cast<int>(mu.size()) != grid.dimension())
        throw GridError("offset dimension does not match grid");
    GridFunction out(grid);
    for (std::size_t p = 0; p < f.size(); ++p)
        out[p] = f[grid.shifted(p, mu, sign)];
    return out;
}

GridFunction diff(const GridFunction& f, const Stencil& stencil, const Offset& lambda,
                  double h_signed) {
    if (!stencil.contains(lambda))
        throw GridError("offset is not in the stencil");
    if (stencil.dimension() != f.grid().dimension())
        throw GridError("stencil and grid dimensions differ");
    if (!matches_spacing(f.grid(), h_signed))
        throw GridError("|h| does not equal the grid spacing");
    if (is_zero(lambda))
        return f;
    const int sign = h_signed > 0 ? 1 : -1;
    const auto& grid = f.grid();
    GridFunction out(grid);
    for (std::size_t p = 0; p < f.size(); ++p)
        out[p] = (f[grid.shifted(p, lambda, sign)] - f[p]) / h_signed;
    return out;
}

GridFunction composite_diff(const GridFunction& f, const Stencil& stencil,
                            const MultiIndexOffset& lambdas, double h_signed) {
    GridFunction out = f;
    for (auto it = lambdas.rbegin(); it != lambdas.rend(); ++it)
        out = diff(out, stencil, *it, h_signed);
    if (lambdas.empty() && !matches_spacing(f.grid(), h_signed))
        throw GridError("|h| does not equal the grid spacing");
    return out;
}

double l2_grid_norm(const GridFunction& f) {
    const double cell = std::pow(f.grid().spacing(), f.grid().dimension());
    double sum = 0.0;
    for (double v : f.values())
        sum += v * v;
    return std::sqrt(cell * sum);
}

double sup_grid_norm(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values())
        m = std::max(m, std::abs(v));
    return m;
}

namespace {

void accumulate_sobolev(const GridFunction& f, const Stencil& stencil, unsigned r, double h,
                        double& sum) {
    if (r == 0) {
        const double n = l2_grid_norm(f);
        sum += n * n;
        return;
    }
    for (const auto& lambda : stencil.offsets())
        accumulate_sobolev(diff(f, stencil, lambda, h), stencil, r - 1, h, sum);
}

}  // namespace

double difference_sobolev_norm(const GridFunction& f, const Stencil& stencil, unsigned r) {
    double sum = 0.0;
    accumulate_sobolev(f, stencil, r, f.grid().spacing(), sum);
    return std::sqrt(sum);
}

GridFunction restrict_to_coarser(const GridFunction& fine, unsigned j) {
    if (j == 0)
        return fine;
    const auto& fg = fine.grid();
    std::vector<std::size_t> counts = fg.counts();
    const std::size_t factor = std::size_t{1} << j;
    for (auto& c : counts) {
        if (c % factor != 0)
            throw GridError("grids are not nested: point count not divisible by 2^j");
        c /= factor;
    }
    TorusGrid coarse(fg.side_lengths(), counts);
    GridFunction out(coarse);
    std::vector<std::size_t> index;
    for (std::size_t p = 0; p < out.size(); ++p) {
        index = coarse.unflatten(p);
        for (auto& i : index)
            i *= factor;
        out[p] = fine[fg.flatten(index)];
    }
    return out;
}

}  // namespace spde
