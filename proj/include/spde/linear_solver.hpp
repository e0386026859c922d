#pragma once

// Matrix-free Krylov solvers for the nonsymmetric systems (Id - tau L^h) v = rhs.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace spde {

/// y = A x
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

enum class SolverMethod {
    gmres,          ///< restarted GMRES, modified Gram-Schmidt + Givens rotations
    bicgstab,       ///< BiCGStab
    banded_direct,  ///< sparse LU of the assembled periodic band matrix (d = 1 only)
};

std::string to_string(SolverMethod m);
SolverMethod solver_method_from_string(const std::string& s);

struct LinearSolveConfig {
    double tolerance = 1e-12;
    /// 0 selects 10 * (number of unknowns).
    std::size_t max_iterations = 0;
    SolverMethod method = SolverMethod::gmres;
    std::size_t restart = 80;
    /// Absolute residual accepted whatever the tolerance; callers set it to
    /// the rounding floor of the operator so ill-conditioned steps can finish.
    double residual_floor = 0.0;

    void validate() const;
};

struct SolveResult {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t iterations, double residual)
        : std::runtime_error(what + " (iterations " + std::to_string(iterations) +
                             ", relative residual " + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

/// Solves A x = b to ||b - A x|| <= max(tol ||b||, residual_floor), starting
/// from the contents of x.
/// Throws SolverError when the iteration budget runs out.
SolveResult gmres(const LinearMap& A, std::span<const double> b, std::span<double> x,
                  const LinearSolveConfig& cfg);
SolveResult bicgstab(const LinearMap& A, std::span<const double> b, std::span<double> x,
                     const LinearSolveConfig& cfg);

}  // namespace spde
