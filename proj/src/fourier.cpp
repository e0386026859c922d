#include "spde/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace spde {

namespace {

// the FFTW planner is not reentrant
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct FourierTransform::Impl {
    TorusGrid grid;
    std::size_t n;
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Impl(const TorusGrid& g) : grid(g), n(g.point_count()) {
        std::vector<int> dims;
        for (auto c : grid.counts())
            dims.push_back(static_cast<int>(c));
        std::lock_guard lock(planner_mutex());
        buffer = fftw_alloc_complex(n);
        forward = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buffer, buffer,
                                FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buffer, buffer,
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(buffer);
    }

    Complex* data() { return reinterpret_cast<Complex*>(buffer); }
};

FourierTransform::FourierTransform(const TorusGrid& grid) : impl_(std::make_unique<Impl>(grid)) {}
FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept = default;

const TorusGrid& FourierTransform::grid() const noexcept { return impl_->grid; }

Spectrum FourierTransform::forward(std::span<const double> values) {
    if (values.size() != impl_->n)
        throw GridError("transform input size does not match the grid");
    Complex* buf = impl_->data();
    for (std::size_t p = 0; p < impl_->n; ++p)
        buf[p] = values[p];
    fftw_execute(impl_->forward);
    return Spectrum(buf, buf + impl_->n);
}

Spectrum FourierTransform::forward(std::span<const Complex> values) {
    if (values.size() != impl_->n)
        throw GridError("transform input size does not match the grid");
    Complex* buf = impl_->data();
    std::copy(values.begin(), values.end(), buf);
    fftw_execute(impl_->forward);
    return Spectrum(buf, buf + impl_->n);
}

std::vector<Complex> FourierTransform::inverse(std::span<const Complex> spectrum) {
    if (spectrum.size() != impl_->n)
        throw GridError("spectrum size does not match the grid");
    Complex* buf = impl_->data();
    std::copy(spectrum.begin(), spectrum.end(), buf);
    fftw_execute(impl_->backward);
    const double scale = 1.0 / static_cast<double>(impl_->n);
    std::vector<Complex> out(buf, buf + impl_->n);
    for (auto& v : out)
        v *= scale;
    return out;
}

std::vector<double> FourierTransform::inverse_real(std::span<const Complex> spectrum) {
    const auto full = inverse(spectrum);
    std::vector<double> out(full.size());
    for (std::size_t p = 0; p < full.size(); ++p)
        out[p] = full[p].real();
    return out;
}

// ---------------------------------------------------------------------------

std::vector<int> mode_of(const TorusGrid& grid, std::size_t flat) {
    const auto index = grid.unflatten(flat);
    std::vector<int> m(index.size());
    for (std::size_t a = 0; a < index.size(); ++a) {
        const auto n = grid.counts()[a];
        m[a] = index[a] <= n / 2 ? static_cast<int>(index[a])
                                 : static_cast<int>(index[a]) - static_cast<int>(n);
    }
    return m;
}

std::vector<double> wavevector(const TorusGrid& grid, std::size_t flat) {
    const auto m = mode_of(grid, flat);
    std::vector<double> k(m.size());
    for (std::size_t a = 0; a < m.size(); ++a)
        k[a] = 2.0 * std::numbers::pi * m[a] / grid.side_lengths()[a];
    return k;
}

std::vector<Complex> tabulate_symbol(const TorusGrid& grid, const SymbolFn& symbol) {
    const std::size_t n = grid.point_count();
    const auto d = static_cast<std::size_t>(grid.dimension());
    std::vector<Complex> out(n);
    std::vector<std::size_t> nyquist_axes;
    for (std::size_t p = 0; p < n; ++p) {
        auto k = wavevector(grid, p);
        const auto index = grid.unflatten(p);
        nyquist_axes.clear();
        for (std::size_t a = 0; a < d; ++a)
            if (grid.counts()[a] % 2 == 0 && index[a] == grid.counts()[a] / 2)
                nyquist_axes.push_back(a);
        if (nyquist_axes.empty()) {
            out[p] = symbol(k);
            continue;
        }
        Complex sum = 0.0;
        const std::size_t combos = std::size_t{1} << nyquist_axes.size();
        const auto base = k;
        for (std::size_t mask = 0; mask < combos; ++mask) {
            for (std::size_t q = 0; q < nyquist_axes.size(); ++q)
                k[nyquist_axes[q]] = (mask >> q & 1U) ? -base[nyquist_axes[q]] : base[nyquist_axes[q]];
            sum += symbol(k);
        }
        out[p] = sum / static_cast<double>(combos);
    }
    return out;
}

GridFunction apply_multiplier(const GridFunction& f, const SymbolFn& symbol) {
    FourierTransform ft(f.grid());
    auto spec = ft.forward(f.values());
    const auto sym = tabulate_symbol(f.grid(), symbol);
    for (std::size_t p = 0; p < spec.size(); ++p)
        spec[p] *= sym[p];
    return GridFunction(f.grid(), ft.inverse_real(spec));
}

Complex directional_symbol(const Offset& lambda, std::span<const double> k) {
    double dot = 0.0;
    for (std::size_t a = 0; a < lambda.size(); ++a)
        dot += lambda[a] * k[a];
    return {0.0, dot};
}

Complex difference_symbol(const Offset& lambda, double h_signed, std::span<const double> k) {
    if (is_zero(lambda))
        return 1.0;
    double dot = 0.0;
    for (std::size_t a = 0; a < lambda.size(); ++a)
        dot += lambda[a] * k[a];
    // (e^{i theta} - 1)/h written to avoid cancellation for small theta
    const double theta = h_signed * dot;
    const double half = 0.5 * theta;
    const double s = std::sin(half);
    return Complex(-2.0 * s * s, std::sin(theta)) / h_signed;
}

}  // namespace spde
