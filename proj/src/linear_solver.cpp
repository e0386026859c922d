#include "spde/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spde {

std::string to_string(SolverMethod m) {
    switch (m) {
    case SolverMethod::gmres: return "gmres";
    case SolverMethod::bicgstab: return "bicgstab";
    case SolverMethod::banded_direct: return "banded";
    }
    return "unknown";
}

SolverMethod solver_method_from_string(const std::string& s) {
    if (s == "gmres")
        return SolverMethod::gmres;
    if (s == "bicgstab")
        return SolverMethod::bicgstab;
    if (s == "banded" || s == "direct")
        return SolverMethod::banded_direct;
    throw std::invalid_argument("unknown solver method '" + s + "'");
}

void LinearSolveConfig::validate() const {
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw std::invalid_argument("solver tolerance must lie in (0,1)");
    if (restart == 0)
        throw std::invalid_argument("GMRES restart length must be positive");
    if (!(residual_floor >= 0.0))
        throw std::invalid_argument("residual floor must be nonnegative");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void residual(const LinearMap& A, std::span<const double> b, std::span<const double> x,
              std::span<double> r) {
    A(x, r);
    for (std::size_t k = 0; k < r.size(); ++k)
        r[k] = b[k] - r[k];
}

std::size_t budget(const LinearSolveConfig& cfg, std::size_t n) {
    return cfg.max_iterations > 0 ? cfg.max_iterations : 10 * n;
}

}  // namespace

SolveResult gmres(const LinearMap& A, std::span<const double> b, std::span<double> x,
                  const LinearSolveConfig& cfg) {
    cfg.validate();
    const std::size_t n = b.size();
    const std::size_t max_it = budget(cfg, n);
    const double bnorm = norm(b);
    std::vector<double> r(n);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {0, 0.0};
    }
    const double target = std::max(cfg.tolerance * bnorm, cfg.residual_floor);
    const std::size_t m = std::min(cfg.restart, n);

    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    std::vector<double> H((m + 1) * m), cs(m), sn(m), g(m + 1), y(m);
    auto h = [&](std::size_t i, std::size_t j) -> double& { return H[i * m + j]; };

    std::size_t iterations = 0;
    residual(A, b, x, r);
    double rnorm = norm(r);
    while (rnorm > target) {
        if (iterations >= max_it)
            throw SolverError("GMRES did not converge", iterations, rnorm / bnorm);
        for (std::size_t k = 0; k < n; ++k)
            V[0][k] = r[k] / rnorm;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = rnorm;
        std::size_t used = 0;
        for (std::size_t j = 0; j < m && iterations < max_it; ++j) {
            ++iterations;
            A(V[j], V[j + 1]);
            for (std::size_t i = 0; i <= j; ++i) {
                h(i, j) = dot(V[j + 1], V[i]);
                for (std::size_t k = 0; k < n; ++k)
                    V[j + 1][k] -= h(i, j) * V[i][k];
            }
            h(j + 1, j) = norm(V[j + 1]);
            if (h(j + 1, j) > 0.0)
                for (auto& v : V[j + 1])
                    v /= h(j + 1, j);
            for (std::size_t i = 0; i < j; ++i) {
                const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
                h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
                h(i, j) = t;
            }
            const double denom = std::hypot(h(j, j), h(j + 1, j));
            cs[j] = denom == 0.0 ? 1.0 : h(j, j) / denom;
            sn[j] = denom == 0.0 ? 0.0 : h(j + 1, j) / denom;
            h(j, j) = denom;
            h(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            used = j + 1;
            if (std::abs(g[j + 1]) <= 0.5 * target)
                break;
        }
        for (std::size_t i = used; i-- > 0;) {
            double s = g[i];
            for (std::size_t k = i + 1; k < used; ++k)
                s -= h(i, k) * y[k];
            y[i] = s / h(i, i);
        }
        for (std::size_t i = 0; i < used; ++i)
            for (std::size_t k = 0; k < n; ++k)
                x[k] += y[i] * V[i][k];
        residual(A, b, x, r);
        const double previous = rnorm;
        rnorm = norm(r);
        if (rnorm > target && rnorm >= previous)
            throw SolverError("GMRES stagnated", iterations, rnorm / bnorm);
    }
    return {iterations, rnorm / bnorm};
}

SolveResult bicgstab(const LinearMap& A, std::span<const double> b, std::span<double> x,
                     const LinearSolveConfig& cfg) {
    cfg.validate();
    const std::size_t n = b.size();
    const std::size_t max_it = budget(cfg, n);
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {0, 0.0};
    }
    const double target = std::max(cfg.tolerance * bnorm, cfg.residual_floor);

    std::vector<double> r(n), r0(n), p(n), v(n), s(n), t(n);
    std::size_t it = 0;
    residual(A, b, x, r);
    double rnorm = norm(r);
    // the recursively updated residual can drift from b - A x; restart from
    // the true residual until it meets the target
    while (rnorm > target) {
        r0 = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        while (rnorm > target) {
            if (it >= max_it)
                throw SolverError("BiCGStab did not converge", it, rnorm / bnorm);
            ++it;
            const double rho_next = dot(r0, r);
            if (rho_next == 0.0)
                break;
            const double beta = (rho_next / rho) * (alpha / omega);
            rho = rho_next;
            for (std::size_t k = 0; k < n; ++k)
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
            A(p, v);
            alpha = rho / dot(r0, v);
            for (std::size_t k = 0; k < n; ++k)
                s[k] = r[k] - alpha * v[k];
            if (norm(s) <= target) {
                for (std::size_t k = 0; k < n; ++k)
                    x[k] += alpha * p[k];
                break;
            }
            A(s, t);
            const double tt = dot(t, t);
            omega = tt == 0.0 ? 0.0 : dot(t, s) / tt;
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += alpha * p[k] + omega * s[k];
                r[k] = s[k] - omega * t[k];
            }
            rnorm = norm(r);
            if (omega == 0.0)
                break;
        }
        residual(A, b, x, r);
        rnorm = norm(r);
        if (rnorm > target && it >= max_it)
            throw SolverError("BiCGStab did not converge", it, rnorm / bnorm);
    }
    return {it, rnorm / bnorm};
}

}  // namespace spde
