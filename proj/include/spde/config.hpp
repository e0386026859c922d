#pragma once

// Experiment configuration: an INI file with [problem], [numerics],
// [statistics], [output] and [taylor] sections.
//
//   [problem]
//   dimension = 1
//   length = 1              ; side length L, a constant expression such as 2*pi
//   noise_dim = 1
//   kappa = 1e-8            ; parabolicity margin required by the validators
//   a11 = 1                 ; a^{alpha beta}, alpha, beta in 0..d (aXY sets aYX too)
//   b11 = 0.8               ; b^{alpha rho}, alpha in 0..d, rho in 1..d1
//   f = 0
//   g1 = 0                  ; g^rho
//   u0 = sin(2*pi*x)
//
//   [numerics]
//   levels = 32,64,128,256  ; points per axis of the base meshes, dyadic
//   steps = 64
//   horizon = 1
//   k = 1
//   solver = gmres          ; gmres | bicgstab | banded
//   tolerance = 1e-12
//   max_iterations = 0      ; 0 selects 10 * unknowns
//
//   [statistics]
//   paths = 64
//   seed = 20240101
//   threads = 0             ; 0 selects the hardware concurrency
//
//   [output]
//   dir = out
//   format = csv            ; csv | json
//
//   [taylor]
//   mode = 1                ; phi = sin(2 pi mode x1 / L)
//   lambda = 1              ; comma-separated offset components
//   mu = 2
//   orders = 0,1,2
//
// Fields are expressions in t and x1..xd (see expression.hpp).

#include "spde/coefficients.hpp"
#include "spde/linear_solver.hpp"
#include "spde/noise.hpp"
#include "spde/stencil_grid.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spde {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ReportFormat { csv, json };

std::string to_string(ReportFormat f);
ReportFormat report_format_from_string(const std::string& s);

struct ProblemSpec {
    int dimension = 1;
    double length = 1.0;
    std::size_t noise_dim = 1;
    double kappa = 1e-8;
    std::map<std::pair<int, int>, std::string> a;  ///< (alpha, beta) with alpha <= beta
    std::map<std::pair<int, int>, std::string> b;  ///< (alpha, rho), rho 1-based
    std::string f = "0";
    std::map<int, std::string> g;  ///< rho, 1-based
    std::string u0 = "0";
};

struct NumericsSpec {
    std::vector<std::size_t> levels{32, 64, 128, 256};
    std::size_t steps = 64;
    double horizon = 1.0;
    unsigned k = 1;
    LinearSolveConfig solve;
};

struct StatisticsSpec {
    std::size_t paths = 64;
    std::uint64_t seed = 20240101;
    std::size_t threads = 0;
};

struct OutputSpec {
    std::filesystem::path dir = "out";
    ReportFormat format = ReportFormat::csv;
};

struct TaylorSpec {
    int mode = 1;
    Offset lambda{1};
    Offset mu{2};
    std::vector<unsigned> orders{0, 1, 2};
};

struct ExperimentConfig {
    ProblemSpec problem;
    NumericsSpec numerics;
    StatisticsSpec statistics;
    OutputSpec output;
    TaylorSpec taylor;
    /// The text the config was parsed from, echoed into reports.
    std::string source;

    /// Throws ConfigError when levels are not strictly increasing by factors
    /// of two, paths is zero, or k + 1 exceeds the number of levels.
    void validate() const;

    TimeGrid time_grid() const { return {numerics.horizon, numerics.steps}; }
    TorusGrid grid(std::size_t points_per_axis) const;
    /// Coordinate stencil {0, e_1, ..., e_d}.
    Stencil stencil() const { return Stencil::coordinate(problem.dimension); }
    ContinuousCoefficients coefficients() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);

}  // namespace spde
