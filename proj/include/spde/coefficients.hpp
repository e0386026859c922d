#pragma once

// Coefficient fields of the SPDE and of the difference scheme.
//
// ContinuousCoefficients carry a^{alpha beta}(t,x) for alpha,beta in 0..d
// (index 0 is the zeroth-order slot, D_0 = identity), b^{alpha rho}(t,x),
// the free terms f, g^rho and the initial data u0.  DiscreteCoefficients
// carry the stencil-indexed fields frak_a^{lambda mu}_i(x), frak_b^{lambda rho}_i(x)
// sampled on a torus grid at each time index.

#include "spde/expression.hpp"
#include "spde/noise.hpp"
#include "spde/stencil_grid.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace spde {

/// Scalar field of (t, x).  Constant fields remember their value so that
/// structural questions (diagonal diffusion, constant coefficients) can be
/// answered without sampling.
class Field {
public:
    using Fn = std::function<double(double, std::span<const double>)>;

    Field() : Field(0.0) {}
    static Field constant(double value);
    static Field from_expression(const Expression& e);
    static Field function(Fn fn, bool varies_in_t, bool varies_in_x);

    double operator()(double t, std::span<const double> x) const { return fn_(t, x); }

    bool varies_in_x() const noexcept { return varies_x_; }
    bool varies_in_t() const noexcept { return varies_t_; }
    std::optional<double> constant_value() const noexcept { return value_; }
    bool is_zero() const noexcept { return value_ && *value_ == 0.0; }

private:
    explicit Field(double value)
        : fn_([value](double, std::span<const double>) { return value; }), value_(value) {}

    Fn fn_;
    bool varies_t_ = false;
    bool varies_x_ = false;
    std::optional<double> value_;
};

class ContinuousCoefficients {
public:
    /// All fields zero.
    ContinuousCoefficients(int dimension, std::size_t noise_dim);

    int dimension() const noexcept { return dim_; }
    std::size_t noise_dim() const noexcept { return noise_dim_; }

    /// Sets a^{alpha beta} and a^{beta alpha}.
    void set_a(int alpha, int beta, Field field);
    void set_b(int alpha, std::size_t rho, Field field);
    void set_f(Field field) { f_ = std::move(field); }
    void set_g(std::size_t rho, Field field);
    void set_u0(Field field) { u0_ = std::move(field); }

    const Field& a_field(int alpha, int beta) const;
    const Field& b_field(int alpha, std::size_t rho) const;
    const Field& f_field() const noexcept { return f_; }
    const Field& g_field(std::size_t rho) const { return g_.at(rho); }
    const Field& u0_field() const noexcept { return u0_; }

    double a(int alpha, int beta, double t, std::span<const double> x) const {
        return a_field(alpha, beta)(t, x);
    }
    double b(int alpha, std::size_t rho, double t, std::span<const double> x) const {
        return b_field(alpha, rho)(t, x);
    }

    /// All a and b fields independent of x.
    bool constant_in_x() const;
    /// All a and b fields independent of t.
    bool time_invariant() const;
    /// a^{alpha beta} known to vanish for alpha != beta with alpha, beta >= 1.
    bool diagonal_diffusion() const;
    bool has_free_terms() const;

private:
    std::size_t a_index(int alpha, int beta) const;
    std::size_t b_index(int alpha, std::size_t rho) const;

    int dim_;
    std::size_t noise_dim_;
    std::vector<Field> a_;  // (d+1) x (d+1)
    std::vector<Field> b_;  // (d+1) x d1
    Field f_;
    std::vector<Field> g_;
    Field u0_;
};

class DiscreteCoefficients {
public:
    /// All-zero coefficients for time indices 0..steps.  When `time_invariant`
    /// only one slice is stored and every index reads it.
    DiscreteCoefficients(Stencil stencil, TorusGrid grid, std::size_t noise_dim,
                         std::size_t steps, bool time_invariant = true);

    /// Time-invariant, constant-in-x coefficients from |Lambda| x |Lambda| and
    /// |Lambda| x d1 tables; the a table is replaced by its symmetric part.
    static DiscreteCoefficients constant(Stencil stencil, TorusGrid grid, std::size_t steps,
                                         const Eigen::MatrixXd& a_table,
                                         const Eigen::MatrixXd& b_table);

    const Stencil& stencil() const noexcept { return stencil_; }
    const TorusGrid& grid() const noexcept { return grid_; }
    std::size_t noise_dim() const noexcept { return noise_dim_; }
    std::size_t steps() const noexcept { return steps_; }
    bool time_invariant() const noexcept { return slices_.size() == 1; }
    bool constant_in_x() const;

    /// Assigns the symmetric pair (lambda, mu), (mu, lambda).  `values` holds
    /// one entry (constant in x) or one per grid point.
    void set_a(std::size_t i, std::size_t lambda, std::size_t mu, std::vector<double> values);
    void set_b(std::size_t i, std::size_t lambda, std::size_t rho, std::vector<double> values);

    double a(std::size_t i, std::size_t lambda, std::size_t mu, std::size_t point) const {
        const auto& v = slice(i).a[lambda * stencil_.size() + mu];
        return v.size() == 1 ? v[0] : v[point];
    }
    double b(std::size_t i, std::size_t lambda, std::size_t rho, std::size_t point) const {
        const auto& v = slice(i).b[lambda * noise_dim_ + rho];
        return v.size() == 1 ? v[0] : v[point];
    }
    bool a_is_zero(std::size_t i, std::size_t lambda, std::size_t mu) const;
    bool b_is_zero(std::size_t i, std::size_t lambda, std::size_t rho) const;

    /// Coefficient tables at one grid point.
    Eigen::MatrixXd a_table(std::size_t i, std::size_t point = 0) const;
    Eigen::MatrixXd b_table(std::size_t i, std::size_t point = 0) const;

    /// Largest |frak_a| and |frak_b| over all entries, times and points.
    double max_abs_a() const;
    double max_abs_b() const;

private:
    struct Slice {
        std::vector<std::vector<double>> a;
        std::vector<std::vector<double>> b;
    };
    const Slice& slice(std::size_t i) const { return slices_.size() == 1 ? slices_[0] : slices_.at(i); }
    Slice& slice_mut(std::size_t i);
    void check_values(const std::vector<double>& values) const;

    Stencil stencil_;
    TorusGrid grid_;
    std::size_t noise_dim_;
    std::size_t steps_;
    std::vector<Slice> slices_;
};

struct ParabolicityReport {
    bool pass = false;
    /// Smallest eigenvalue seen over all samples and noise indices.
    double worst_margin = 0.0;
    std::size_t samples_checked = 0;
};

struct SpaceTimePoint {
    double t;
    std::vector<double> x;
};

struct GridSample {
    std::size_t step;
    std::size_t point;
};

/// Minimum eigenvalue of [2 a^{alpha beta} - b^{alpha rho} b^{beta rho}]_{alpha,beta >= 1}
/// over the samples and rho; pass iff it is at least kappa.
ParabolicityReport check_parabolicity_continuous(const ContinuousCoefficients& c,
                                                 std::span<const SpaceTimePoint> samples,
                                                 double kappa);

/// Same test on [2 frak_a^{lambda mu} - frak_b^{lambda rho} frak_b^{mu rho}] over
/// lambda, mu in Lambda_0.
ParabolicityReport check_parabolicity_discrete(const DiscreteCoefficients& dc,
                                               std::span<const GridSample> samples, double kappa);

/// Every time step at the origin for x-independent coefficients, otherwise 1000
/// Halton points in [0,T] x torus.
std::vector<SpaceTimePoint> default_continuous_samples(const ContinuousCoefficients& c,
                                                       const TorusGrid& grid, const TimeGrid& tg);
/// Every (time step, grid point) pair; one point per step when constant in x.
std::vector<GridSample> default_discrete_samples(const DiscreteCoefficients& dc);

/// Residuals of the five consistency identities at (t_i, x).
struct ConsistencyResidual {
    double a00 = 0.0;
    std::vector<double> a_first;   // per alpha in 1..d
    std::vector<double> a_second;  // row-major (alpha, beta) in 1..d
    std::vector<double> b0;        // per rho
    std::vector<double> b_first;   // row-major (alpha, rho)

    double max() const;
};

ConsistencyResidual consistency_residual(const DiscreteCoefficients& dc,
                                         const ContinuousCoefficients& c, const TimeGrid& tg,
                                         std::size_t i, std::size_t point);

/// Largest consistency residual over every time index and grid point.
double max_consistency_residual(const DiscreteCoefficients& dc, const ContinuousCoefficients& c,
                                const TimeGrid& tg);

class UnsupportedCoefficients : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Discrete coefficients satisfying the consistency identities for the
/// coordinate stencil {0, e_1, ..., e_d} and diagonal diffusion:
/// frak_a^{e_j e_j} = a^{jj}, frak_a^{00} = a^{00}, frak_b^{e_j rho} = b^{j rho},
/// frak_b^{0 rho} = b^{0 rho}, and the first-order part a^{j0} + a^{0j} split
/// evenly over the symmetric pair (e_j, 0), (0, e_j).
DiscreteCoefficients build_discrete_from_continuous(const ContinuousCoefficients& c,
                                                    const Stencil& stencil, const TorusGrid& grid,
                                                    const TimeGrid& tg);

}  // namespace spde
