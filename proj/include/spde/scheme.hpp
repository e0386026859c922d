#pragma once

// The implicit space-time scheme
//
//   v_i = v_{i-1} + (L^h_i v_i + f_i) tau + sum_rho (M^{h,rho}_{i-1} v_{i-1} + g^rho_{i-1}) xi^rho_i
//
// with L^h_i = frak_a^{lambda mu}_i delta_{h,lambda} delta_{-h,mu} and
// M^{h,rho}_i = frak_b^{lambda rho}_i delta_{h,lambda}, its exact Fourier
// solution for x-independent coefficients, and the Fourier solution of the
// same recursion with the differential operators in place of L^h, M^h.

#include "spde/coefficients.hpp"
#include "spde/fourier.hpp"
#include "spde/linear_solver.hpp"
#include "spde/noise.hpp"
#include "spde/stencil_grid.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spde {

/// Free terms sampled on the grid; an empty vector means identically zero.
struct FreeTerms {
    std::vector<GridFunction> f;               ///< f_i for i = 0..n
    std::vector<std::vector<GridFunction>> g;  ///< g^rho_i, indexed [rho][i]
};

struct SchemeProblem {
    DiscreteCoefficients coefficients;
    TimeGrid time_grid;
    GridFunction initial;
    FreeTerms free_terms;

    const TorusGrid& grid() const noexcept { return coefficients.grid(); }
    const Stencil& stencil() const noexcept { return coefficients.stencil(); }
    std::size_t noise_dim() const noexcept { return coefficients.noise_dim(); }

    /// Throws std::invalid_argument when fields live on different grids or
    /// the time indices do not span 0..n.
    void validate() const;
};

/// Samples u0, f and g from `c` on `grid` and builds consistent discrete
/// coefficients for the coordinate stencil.
SchemeProblem make_scheme_problem(const ContinuousCoefficients& c, const Stencil& stencil,
                                  const TorusGrid& grid, const TimeGrid& tg);

struct Trajectory {
    TorusGrid grid;
    TimeGrid time_grid;
    std::vector<GridFunction> states;  ///< i = 0..n
    /// Fingerprint of the noise path that drove the run, when known.
    std::optional<std::uint64_t> noise_fingerprint;
};

/// sum_{lambda,mu} frak_a^{lambda mu}_i(x) (delta_{h,lambda} delta_{-h,mu} phi)(x)
GridFunction apply_Lh(const DiscreteCoefficients& dc, std::size_t i, const GridFunction& phi);

/// sum_lambda frak_b^{lambda rho}_i(x) (delta_{h,lambda} phi)(x)
GridFunction apply_Mh(const DiscreteCoefficients& dc, std::size_t i, std::size_t rho,
                      const GridFunction& phi);

/// Crude upper bound on tau * ||L^h_i|| from |delta_{h,lambda}| <= 2/h.
double tau_operator_bound(const DiscreteCoefficients& dc, std::size_t i, double tau);

/// Residual norm that rounding alone produces when Id - tau L^h is applied
/// to a vector of norm `x_norm`: 16 eps (1 + tau ||L^h||) ||x||.  Steps accept
/// residuals below it even when the relative tolerance is tighter.
double rounding_residual_floor(double tau_bound, double x_norm);

struct StepDiagnostics {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    /// The step stopped at the rounding floor rather than at the tolerance.
    bool at_rounding_floor = false;
};

/// Advances the scheme one step at a time.  Holds the factorisation of
/// Id - tau L^h for the direct method and reuses it while the coefficients
/// do not change in time.
class ImplicitStepper {
public:
    ImplicitStepper(const SchemeProblem& problem, LinearSolveConfig cfg);
    ~ImplicitStepper();
    ImplicitStepper(ImplicitStepper&&) noexcept;
    ImplicitStepper& operator=(ImplicitStepper&&) noexcept;

    /// v_i from v_{i-1} and the increments xi^rho_i.  Throws SolverError when
    /// the linear solve does not reach the configured tolerance.
    GridFunction step(const GridFunction& previous, std::size_t i, std::span<const double> xi);

    /// Right-hand side v_{i-1} + tau f_i + sum_rho (M^{h,rho}_{i-1} v_{i-1} + g^rho_{i-1}) xi^rho_i.
    GridFunction right_hand_side(const GridFunction& previous, std::size_t i,
                                 std::span<const double> xi) const;

    const StepDiagnostics& last_step() const noexcept { return last_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    struct Direct;

    const SchemeProblem* problem_;
    LinearSolveConfig cfg_;
    StepDiagnostics last_;
    std::vector<std::string> warnings_;
    std::unique_ptr<Direct> direct_;
};

GridFunction implicit_step(const GridFunction& previous, std::size_t i, std::span<const double> xi,
                           const SchemeProblem& problem, const LinearSolveConfig& cfg);

/// states[0] = v0 and states[i] = implicit_step(states[i-1], i, xi_i).
Trajectory solve_trajectory(const SchemeProblem& problem, const NoisePath& noise,
                            const LinearSolveConfig& cfg);

/// Same recursion, handing each state to `visit` instead of storing it.
void solve_trajectory_streaming(const SchemeProblem& problem, const NoisePath& noise,
                                const LinearSolveConfig& cfg,
                                const std::function<void(std::size_t, const GridFunction&)>& visit);

/// Exact Fourier diagonalisation of the scheme for x-independent
/// coefficients: per mode v_i = [v_{i-1} + tau f_i + sum (sigma_M v_{i-1} + g) xi] / (1 - tau sigma_L).
Trajectory solve_discrete_spectral(const SchemeProblem& problem, const NoisePath& noise);

/// Symbols of L^h_i and M^{h,rho}_i at wavevector k for x-independent coefficients.
Complex discrete_L_symbol(const DiscreteCoefficients& dc, std::size_t i, std::span<const double> k);
Complex discrete_M_symbol(const DiscreteCoefficients& dc, std::size_t i, std::size_t rho,
                          std::span<const double> k);

/// Symbols of the differential operators L(t) and M^rho(t) for x-independent coefficients.
Complex continuous_L_symbol(const ContinuousCoefficients& c, double t, std::span<const double> k);
Complex continuous_M_symbol(const ContinuousCoefficients& c, std::size_t rho, double t,
                            std::span<const double> k);

/// The implicit time scheme with the differential operators, solved per
/// Fourier mode of `grid` (spectral truncation at the grid resolution).
Trajectory solve_time_scheme_spectral(const ContinuousCoefficients& c, const TorusGrid& grid,
                                      const TimeGrid& tg, const NoisePath& noise);

class NotConstantCoefficients : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Header "SPDETRAJ", u32 d, u32 count per axis, u32 n, f64 tau, f64 L (axis 0),
/// then n+1 frames of little-endian f64 values in row-major order.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& file);
Trajectory read_trajectory(const std::filesystem::path& file);

}  // namespace spde
