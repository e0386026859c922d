#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include "spde/fourier.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace spde::oracle {

using Exact = boost::multiprecision::cpp_rational;

/// Richardson weights by fraction-exact Gauss-Jordan elimination on
/// V^{ij} = 2^{-(i-1)(j-1)}, solving beta V = e_1 for the row vector beta.
std::vector<Exact> exact_weights(unsigned k);

/// beta_j = L_j(0), the Lagrange basis on nodes 2^{-j} evaluated at zero,
/// in long double.
std::vector<long double> lagrange_weights(unsigned k);

/// (p+2)! sum_j A_{p,j} a^{j+1} b^{p+1-j}, obtained from the h^p coefficient of
/// delta_{h,a} delta_{-h,b} x^{p+2} at x = 0 by binomial expansion:
/// a^{p+2} + (-b)^{p+2} - (a-b)^{p+2}.
Exact double_difference_monomial_coefficient(unsigned p, std::int64_t a, std::int64_t b);

/// Scalar implicit recursion for one Fourier mode,
/// v_i = (v_{i-1} + sigma_m v_{i-1} xi_i) / (1 - tau sigma_l), from v_0.
std::vector<Complex> single_mode_recursion(Complex v0, Complex sigma_l, Complex sigma_m, double tau,
                                           const std::vector<double>& xi);

/// Dense (Id - tau L^h) for d = 1 with a^{11} entries of the coordinate stencil
/// assembled entry by entry from the three-point formula, including the
/// first-order split a^{10} = a^{01} = c/2 and a^{00}.
std::vector<std::vector<double>> dense_implicit_matrix_1d(std::size_t n, double h, double tau,
                                                          double a11, double c, double a00);

/// Gaussian elimination with partial pivoting on a dense copy.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b);

}  // namespace spde::oracle
