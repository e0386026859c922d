#pragma once

// The h-expansion v^h = v^(0) + sum_j h^j/j! v^(j) + R: correction operators,
// the time-discretised correction system, the remainder, and Taylor checks
// for single and double differences.

#include "spde/coefficients.hpp"
#include "spde/fourier.hpp"
#include "spde/noise.hpp"
#include "spde/scheme.hpp"
#include "spde/stencil_grid.hpp"

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace spde {

using Rational = boost::rational<std::int64_t>;

/// A_{p,j} = (-1)^{p-j} / ((j+1)! (p-j+1)!).  Throws std::out_of_range for
/// j > p or p > 18 (factorials leave 64 bits).
Rational coeff_A(unsigned p, unsigned j);
double coeff_A_value(unsigned p, unsigned j);

/// C_p^l
std::uint64_t binomial(unsigned p, unsigned l);

/// Symbol of L^(p) at wavevector k from a raw (lambda, mu) table over the
/// stencil, with d_lambda = i lambda.k:
///   p = 0: sum_{lambda,mu} a^{lambda mu} d_lambda d_mu  (d_0 = 1)
///   p > 0: p! sum_{lambda,mu != 0} a^{lambda mu} sum_j A_{p,j} d_lambda^{j+1} d_mu^{p-j+1}
///          + a^{lambda 0} d_lambda^{p+1}/(p+1) + (-1)^p a^{0 mu} d_mu^{p+1}/(p+1)
/// which is the p-th h-derivative at h = 0 of the symbol of L^h.
Complex correction_L_symbol(const Stencil& stencil, const Eigen::MatrixXd& a_table, unsigned p,
                            std::span<const double> k);

/// Symbol of M^(p)rho: sum_lambda b^{lambda rho} d_lambda^{p+1}/(p+1), the
/// lambda = 0 entry included only for p = 0.
Complex correction_M_symbol(const Stencil& stencil, const Eigen::MatrixXd& b_table,
                            std::size_t rho, unsigned p, std::span<const double> k);

/// Spectral application of L^(p)_i and M^(p)rho_i for x-independent coefficients.
GridFunction apply_correction_L(unsigned p, const DiscreteCoefficients& dc, std::size_t i,
                                const GridFunction& phi);
GridFunction apply_correction_M(unsigned p, const DiscreteCoefficients& dc, std::size_t i,
                                std::size_t rho, const GridFunction& phi);

struct CorrectionSolution {
    unsigned k = 0;
    std::vector<Trajectory> nu;  ///< nu[p-1] = v^(p), p = 1..k
};

inline constexpr unsigned default_max_correction_order = 2;

/// Solves, for p = 1..k in turn and per Fourier mode,
///   (1 - tau s_L) v^(p)_i = v^(p)_{i-1} + tau sum_l C_p^l s_{L^(l)} v^(p-l)_i
///                          + sum_rho (s_M v^(p)_{i-1} + sum_l C_p^l s_{M^(l)} v^(p-l)_{i-1}) xi_i
/// from v^(p)_0 = 0.  The v^(p-l)_i with l >= 1 are already known when
/// step i of order p is taken, so only L v^(p)_i is implicit.  L and M are
/// the differential operators of `c`; the corrections come from `dc`.
CorrectionSolution solve_correction_system(unsigned k, const ContinuousCoefficients& c,
                                           const DiscreteCoefficients& dc, const TimeGrid& tg,
                                           const NoisePath& noise, const Trajectory& nu0,
                                           unsigned max_k = default_max_correction_order);

/// r_i = v^h_i - v^(0)_i - sum_{j=1..k} h^j/j! v^(j)_i, with h the spacing of
/// `vh`.  Every input is restricted to the coarsest of the grids involved.
Trajectory remainder(const Trajectory& vh, const Trajectory& nu0, const CorrectionSolution& corr,
                     unsigned k);

struct TaylorCheck {
    double remainder = 0.0;  ///< l2 norm of the truncated-expansion error
    double bound = 0.0;      ///< |h|^{p+1}/(p+2)! ||d^{p+2} phi|| (single difference only)
    double constant = 0.0;   ///< remainder / (|h|^{p+1} * reference norm)
};

/// delta_{h,lambda} phi - sum_{j<=p} h^j/(j+1)! d_lambda^{j+1} phi, h the grid spacing.
/// Derivatives are spectral, so phi should be a trigonometric polynomial
/// resolved by the grid.  `constant` is remainder / (|h|^{p+1} ||d^{p+2} phi||).
TaylorCheck taylor_single_difference(const GridFunction& phi, const Offset& lambda, unsigned p);

/// delta_{h,lambda} delta_{-h,mu} psi - sum_{i<=p} h^i sum_j A_{i,j} d_lambda^{j+1} d_mu^{i-j+1} psi;
/// `constant` is remainder / (|h|^{p+1} ||psi||_{p+3}) with the spectral
/// Sobolev norm ||(1+|k|^2)^{s/2} psi_hat||.
TaylorCheck taylor_double_difference(const GridFunction& psi, const Offset& lambda,
                                     const Offset& mu, unsigned p);

}  // namespace spde
