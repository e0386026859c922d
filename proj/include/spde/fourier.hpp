#pragma once

// Discrete Fourier transform on a torus grid (FFTW backed) and helpers for
// applying Fourier multipliers.
//
// Spectral index k on an axis with n points carries the integer mode
// m = k for k <= n/2 and m = k - n otherwise; the physical wavenumber is
// 2*pi*m/L.  On even grids the Nyquist index is shared by +n/2 and -n/2, so
// multipliers are averaged over both signs there to keep real data real.

#include "spde/stencil_grid.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace spde {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

class FourierTransform {
public:
    explicit FourierTransform(const TorusGrid& grid);
    ~FourierTransform();
    FourierTransform(FourierTransform&&) noexcept;
    FourierTransform& operator=(FourierTransform&&) noexcept;
    FourierTransform(const FourierTransform&) = delete;
    FourierTransform& operator=(const FourierTransform&) = delete;

    const TorusGrid& grid() const noexcept;

    /// Unnormalised forward transform sum_x f(x) e^{-i m.x 2pi/L}.
    Spectrum forward(std::span<const double> values);
    Spectrum forward(std::span<const Complex> values);
    /// Inverse transform including the 1/N factor.
    std::vector<Complex> inverse(std::span<const Complex> spectrum);
    /// Real part of the inverse transform.
    std::vector<double> inverse_real(std::span<const Complex> spectrum);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Integer mode vector of a flat spectral index.
std::vector<int> mode_of(const TorusGrid& grid, std::size_t flat);

/// Physical wavevector 2*pi*m/L of a flat spectral index.
std::vector<double> wavevector(const TorusGrid& grid, std::size_t flat);

/// Symbol evaluated at every spectral index, averaged over the two signs of
/// each Nyquist component.
using SymbolFn = std::function<Complex(std::span<const double> wavevector)>;
std::vector<Complex> tabulate_symbol(const TorusGrid& grid, const SymbolFn& symbol);

/// Applies a Fourier multiplier to a real grid function.
GridFunction apply_multiplier(const GridFunction& f, const SymbolFn& symbol);

/// i * (lambda . k) for the wavevector k: the symbol of the directional
/// derivative along lambda.
Complex directional_symbol(const Offset& lambda, std::span<const double> k);

/// Symbol of delta_{h,lambda}: (e^{i h lambda.k} - 1)/h, or 1 for lambda = 0.
Complex difference_symbol(const Offset& lambda, double h_signed, std::span<const double> k);

}  // namespace spde
