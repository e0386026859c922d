#pragma once

// Richardson extrapolation across the dyadic mesh family h, h/2, ..., h/2^k.

#include "spde/scheme.hpp"
#include "spde/stencil_grid.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spde {

inline constexpr unsigned max_richardson_order = 12;

struct RichardsonWeights {
    unsigned order = 0;
    std::vector<double> beta;  ///< beta_0..beta_k
};

/// First row of V^{-1}, V^{ij} = 2^{-(i-1)(j-1)}, by solving V^T beta = e_1
/// with partial pivoting in 50-digit arithmetic (V is symmetric).  Throws
/// std::out_of_range for k > 12.
RichardsonWeights vandermonde_weights(unsigned k);

/// sum_j beta_j 2^{-ij} for i = 0..k; entry 0 should be 1 and the rest 0.
std::vector<double> weight_moments(const RichardsonWeights& w);

/// vbar_i(x) = sum_j beta_j v^{2^{-j} h}_i(x) on the coarsest grid.  `levels`
/// holds the trajectories at h, h/2, ..., h/2^k in that order.
Trajectory extrapolate(std::span<const Trajectory> levels, const RichardsonWeights& w);

/// composite_diff of every state with spacing h of the trajectory grid.
Trajectory extrapolated_difference(const Trajectory& traj, const Stencil& stencil,
                                   const MultiIndexOffset& lambdas);

struct OrderEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    /// log(e_j / e_{j+1}) / log(h_j / h_{j+1}) for successive pairs sorted by
    /// decreasing h; log2(e_j / e_{j+1}) on a dyadic family.
    std::vector<double> pairwise;
};

class OrderEstimateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Least-squares slope of log(error) against log(h).  Needs three or more
/// pairs with distinct h and positive errors.
OrderEstimate estimate_order(std::span<const double> h, std::span<const double> errors);

}  // namespace spde
