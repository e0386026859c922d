#include "spde/richardson.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spde {

RichardsonWeights vandermonde_weights(unsigned k) {
    if (k > max_richardson_order)
        throw std::out_of_range("extrapolation order " + std::to_string(k) + " exceeds " +
                                std::to_string(max_richardson_order));
    // V is ill-conditioned (about 1e20 at k = 12); 50 digits keep the
    // eliminated weights exact to double precision
    using Real = boost::multiprecision::cpp_bin_float_50;
    const std::size_t n = k + 1;
    // augmented system [V | e_1], V^{ij} = 2^{-ij} for 0-based i, j
    std::vector<std::vector<Real>> m(n, std::vector<Real>(n + 1, Real(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = ldexp(Real(1), -static_cast<int>(i * j));
    m[0][n] = 1;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(m[r][col]) > abs(m[pivot][col]))
                pivot = r;
        std::swap(m[col], m[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Real factor = m[r][col] / m[col][col];
            for (std::size_t c = col; c <= n; ++c)
                m[r][c] -= factor * m[col][c];
        }
    }
    std::vector<Real> beta(n);
    for (std::size_t i = n; i-- > 0;) {
        Real s = m[i][n];
        for (std::size_t j = i + 1; j < n; ++j)
            s -= m[i][j] * beta[j];
        beta[i] = s / m[i][i];
    }
    RichardsonWeights w{k, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i)
        w.beta[i] = beta[i].convert_to<double>();
    return w;
}

std::vector<double> weight_moments(const RichardsonWeights& w) {
    std::vector<double> out(w.beta.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < w.beta.size(); ++j)
            s += w.beta[j] * std::ldexp(1.0, -static_cast<int>(i * j));
        out[i] = s;
    }
    return out;
}

Trajectory extrapolate(std::span<const Trajectory> levels, const RichardsonWeights& w) {
    if (levels.size() != w.beta.size())
        throw std::invalid_argument("weight order does not match the number of mesh levels");
    const Trajectory& coarse = levels.front();
    const std::size_t frames = coarse.states.size();
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const Trajectory& t = levels[j];
        if (!(t.time_grid == coarse.time_grid) || t.states.size() != frames)
            throw std::invalid_argument("mesh levels use different time grids");
        if (t.noise_fingerprint != coarse.noise_fingerprint)
            throw std::invalid_argument("mesh levels were driven by different noise paths");
        if (!(t.grid == coarse.grid.refined(static_cast<unsigned>(j))))
            throw GridError("mesh level " + std::to_string(j) + " is not the " +
                            std::to_string(j) + "-fold dyadic refinement of the coarse grid");
    }

    Trajectory out{coarse.grid, coarse.time_grid, {}, coarse.noise_fingerprint};
    out.states.reserve(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        GridFunction acc(coarse.grid);
        for (std::size_t j = 0; j < levels.size(); ++j)
            acc.axpy(w.beta[j], restrict_to_coarser(levels[j].states[i], static_cast<unsigned>(j)));
        out.states.push_back(std::move(acc));
    }
    return out;
}

Trajectory extrapolated_difference(const Trajectory& traj, const Stencil& stencil,
                                   const MultiIndexOffset& lambdas) {
    Trajectory out{traj.grid, traj.time_grid, {}, traj.noise_fingerprint};
    out.states.reserve(traj.states.size());
    const double h = traj.grid.spacing();
    for (const auto& s : traj.states)
        out.states.push_back(composite_diff(s, stencil, lambdas, h));
    return out;
}

OrderEstimate estimate_order(std::span<const double> h, std::span<const double> errors) {
    if (h.size() != errors.size())
        throw OrderEstimateError("mesh sizes and errors differ in length");
    if (h.size() < 3)
        throw OrderEstimateError("an order estimate needs at least three (h, error) pairs");
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (!(h[j] > 0.0))
            throw OrderEstimateError("mesh sizes must be positive");
        if (!(errors[j] > 0.0))
            throw OrderEstimateError("error at h = " + std::to_string(h[j]) +
                                     " is not positive; it lies below the resolvable floor");
    }
    std::vector<std::size_t> order(h.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return h[a] > h[b]; });
    for (std::size_t j = 0; j + 1 < order.size(); ++j)
        if (h[order[j]] == h[order[j + 1]])
            throw OrderEstimateError("mesh sizes must be distinct");

    const double n = static_cast<double>(h.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        sx += std::log(h[j]);
        sy += std::log(errors[j]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double dx = std::log(h[j]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(errors[j]) - my);
    }
    OrderEstimate est;
    est.slope = sxy / sxx;
    est.intercept = my - est.slope * mx;
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
        const auto a = order[j], b = order[j + 1];
        est.pairwise.push_back(std::log(errors[a] / errors[b]) / std::log(h[a] / h[b]));
    }
    return est;
}

}  // namespace spde
