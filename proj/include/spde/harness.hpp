#pragma once

// Monte Carlo convergence studies driven by an ExperimentConfig.

#include "spde/coefficients.hpp"
#include "spde/config.hpp"
#include "spde/report.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValidationReport {
    ParabolicityReport continuous;
    std::vector<std::size_t> n_x;
    std::vector<ParabolicityReport> discrete;  ///< per level
    std::vector<double> consistency;           ///< max residual per level
    double kappa = 0.0;
    bool pass = false;
    std::vector<std::string> messages;
};

/// Continuous and discrete parabolicity and the consistency residual of the
/// coordinate-stencil discretisation on every configured level.
ValidationReport run_validation(const ExperimentConfig& cfg);

/// Per path, solves the scheme on h/2^j for every base level h and j = 0..k
/// with one shared noise path, forms the extrapolant on G_h and measures it
/// against the time-scheme solution.  Statistics per level:
///   sup_sq, sup        E max_i sup_x |e|^2 and its square root
///   l2_sq, l2          the same with the l2(G_h) norm
///   diff_sup_sq, diff_sup   for delta_{h,e_1} e
/// PASS iff the fitted order of `sup` is at least k + 1 - 0.3.
/// Throws HarnessError when validation fails.
ConvergenceReport run_acceleration_study(const ExperimentConfig& cfg);

/// Per path, the remainder v^h - v^(0) - sum_j h^j/j! v^(j) for j <= k (k <= 2),
/// statistics as above without the difference pair.
ConvergenceReport run_expansion_study(const ExperimentConfig& cfg);

/// Single- and double-difference Taylor remainders of a sine mode on every
/// level; PASS iff the single remainders respect their bound and the double
/// remainders shrink at dyadic rates in [p + 0.8, p + 1.2].
ConvergenceReport run_taylor_check(const ExperimentConfig& cfg);

/// Runs task(0..count-1) on `threads` workers (0 = hardware concurrency).
/// The first exception by task index is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task);

std::size_t resolve_threads(std::size_t requested);

/// Sample mean and standard error of the mean.
struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};
MeanEstimate mean_estimate(const std::vector<double>& samples);

}  // namespace spde
