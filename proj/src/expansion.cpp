#include "spde/expansion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spde {

namespace {

std::int64_t factorial(unsigned n) {
    std::int64_t f = 1;
    for (unsigned q = 2; q <= n; ++q)
        f *= q;
    return f;
}

double factorial_value(unsigned n) { return std::tgamma(static_cast<double>(n) + 1.0); }

Complex power(Complex z, unsigned n) {
    Complex out = 1.0;
    for (unsigned q = 0; q < n; ++q)
        out *= z;
    return out;
}

void require_constant(const DiscreteCoefficients& dc) {
    if (!dc.constant_in_x())
        throw NotConstantCoefficients("correction operators are applied spectrally and need "
                                      "coefficients constant in x");
}

}  // namespace

Rational coeff_A(unsigned p, unsigned j) {
    if (j > p)
        throw std::out_of_range("A_{p,j} needs j <= p");
    if (p > 18)
        throw std::out_of_range("A_{p,j} is tabulated for p <= 18");
    const std::int64_t sign = (p - j) % 2 == 0 ? 1 : -1;
    return Rational(sign, factorial(j + 1) * factorial(p - j + 1));
}

double coeff_A_value(unsigned p, unsigned j) {
    if (j > p)
        throw std::out_of_range("A_{p,j} needs j <= p");
    const double sign = (p - j) % 2 == 0 ? 1.0 : -1.0;
    return sign / (factorial_value(j + 1) * factorial_value(p - j + 1));
}

std::uint64_t binomial(unsigned p, unsigned l) {
    if (l > p)
        return 0;
    std::uint64_t c = 1;
    for (unsigned q = 1; q <= l; ++q)
        c = c * (p - l + q) / q;
    return c;
}

Complex correction_L_symbol(const Stencil& stencil, const Eigen::MatrixXd& a_table, unsigned p,
                            std::span<const double> k) {
    const auto n = stencil.size();
    if (a_table.rows() != static_cast<Eigen::Index>(n) || a_table.cols() != static_cast<Eigen::Index>(n))
        throw std::invalid_argument("coefficient table does not match the stencil");
    std::vector<Complex> z(n);
    for (std::size_t l = 0; l < n; ++l)
        z[l] = directional_symbol(stencil[l], k);

    Complex sum = 0.0;
    if (p == 0) {
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t m = 0; m < n; ++m) {
                const Complex dl = l == 0 ? Complex(1.0) : z[l];
                const Complex dm = m == 0 ? Complex(1.0) : z[m];
                sum += a_table(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) * dl * dm;
            }
        return sum;
    }
    const double pf = factorial_value(p);
    const double first_sign = p % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t l = 1; l < n; ++l) {
        for (std::size_t m = 1; m < n; ++m) {
            const double a = a_table(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m));
            if (a == 0.0)
                continue;
            Complex inner = 0.0;
            for (unsigned j = 0; j <= p; ++j)
                inner += coeff_A_value(p, j) * power(z[l], j + 1) * power(z[m], p - j + 1);
            sum += pf * a * inner;
        }
        sum += a_table(static_cast<Eigen::Index>(l), 0) * power(z[l], p + 1) / static_cast<double>(p + 1);
        sum += first_sign * a_table(0, static_cast<Eigen::Index>(l)) * power(z[l], p + 1) /
               static_cast<double>(p + 1);
    }
    return sum;
}

Complex correction_M_symbol(const Stencil& stencil, const Eigen::MatrixXd& b_table,
                            std::size_t rho, unsigned p, std::span<const double> k) {
    if (b_table.rows() != static_cast<Eigen::Index>(stencil.size()) ||
        rho >= static_cast<std::size_t>(b_table.cols()))
        throw std::invalid_argument("coefficient table does not match the stencil");
    const auto r = static_cast<Eigen::Index>(rho);
    Complex sum = p == 0 ? Complex(b_table(0, r)) : Complex(0.0);
    for (std::size_t l = 1; l < stencil.size(); ++l)
        sum += b_table(static_cast<Eigen::Index>(l), r) *
               power(directional_symbol(stencil[l], k), p + 1) / static_cast<double>(p + 1);
    return sum;
}

GridFunction apply_correction_L(unsigned p, const DiscreteCoefficients& dc, std::size_t i,
                                const GridFunction& phi) {
    require_constant(dc);
    const auto table = dc.a_table(i);
    return apply_multiplier(phi, [&](std::span<const double> k) {
        return correction_L_symbol(dc.stencil(), table, p, k);
    });
}

GridFunction apply_correction_M(unsigned p, const DiscreteCoefficients& dc, std::size_t i,
                                std::size_t rho, const GridFunction& phi) {
    require_constant(dc);
    const auto table = dc.b_table(i);
    return apply_multiplier(phi, [&](std::span<const double> k) {
        return correction_M_symbol(dc.stencil(), table, rho, p, k);
    });
}

// ---------------------------------------------------------------------------

CorrectionSolution solve_correction_system(unsigned k, const ContinuousCoefficients& c,
                                           const DiscreteCoefficients& dc, const TimeGrid& tg,
                                           const NoisePath& noise, const Trajectory& nu0,
                                           unsigned max_k) {
    if (k > max_k)
        throw std::out_of_range("correction order " + std::to_string(k) + " exceeds the maximum " +
                                std::to_string(max_k));
    if (!c.constant_in_x())
        throw NotConstantCoefficients("the correction system is solved spectrally and needs "
                                      "coefficients constant in x");
    require_constant(dc);
    if (noise.noise_dim() != c.noise_dim() || noise.steps() != tg.steps())
        throw std::invalid_argument("noise path does not match (d1, n)");
    if (dc.noise_dim() != c.noise_dim() || dc.steps() != tg.steps())
        throw std::invalid_argument("discrete coefficients do not match (d1, n)");
    if (!(nu0.time_grid == tg) || nu0.states.size() != tg.steps() + 1)
        throw std::invalid_argument("v^(0) lives on a different time grid");
    if (nu0.noise_fingerprint && *nu0.noise_fingerprint != noise.fingerprint())
        throw std::invalid_argument("v^(0) was driven by a different noise path");

    const TorusGrid& grid = nu0.grid;
    const std::size_t n = tg.steps();
    const std::size_t d1 = c.noise_dim();
    const std::size_t points = grid.point_count();
    const double tau = tg.tau();
    const bool invariant = c.time_invariant() && dc.time_invariant();

    FourierTransform ft(grid);
    // spectra[q][i] holds the transform of v^(q)_i
    std::vector<std::vector<Spectrum>> spectra(k + 1);
    for (const auto& s : nu0.states)
        spectra[0].push_back(ft.forward(s.values()));

    auto sample_L = [&](std::size_t i, unsigned l) {
        if (l == 0)
            return tabulate_symbol(grid, [&](std::span<const double> kv) {
                return continuous_L_symbol(c, tg.time(i), kv);
            });
        const auto table = dc.a_table(i);
        return tabulate_symbol(grid, [&](std::span<const double> kv) {
            return correction_L_symbol(dc.stencil(), table, l, kv);
        });
    };
    auto sample_M = [&](std::size_t i, std::size_t rho, unsigned l) {
        if (l == 0)
            return tabulate_symbol(grid, [&](std::span<const double> kv) {
                return continuous_M_symbol(c, rho, tg.time(i), kv);
            });
        const auto table = dc.b_table(i);
        return tabulate_symbol(grid, [&](std::span<const double> kv) {
            return correction_M_symbol(dc.stencil(), table, rho, l, kv);
        });
    };

    // symbol tables [l][...] for the current step, refreshed when coefficients move
    std::vector<std::vector<Complex>> sL(k + 1);
    std::vector<std::vector<std::vector<Complex>>> sM(k + 1, std::vector<std::vector<Complex>>(d1));

    CorrectionSolution out{k, {}};
    for (unsigned p = 1; p <= k; ++p) {
        auto& cur = spectra[p];
        cur.assign(1, Spectrum(points, Complex(0.0)));
        Trajectory traj{grid, tg, {GridFunction(grid)}, nu0.noise_fingerprint};
        for (std::size_t i = 1; i <= n; ++i) {
            if (i == 1 || !invariant) {
                for (unsigned l = 0; l <= p; ++l) {
                    sL[l] = sample_L(i, l);
                    for (std::size_t rho = 0; rho < d1; ++rho)
                        sM[l][rho] = sample_M(i - 1, rho, l);
                }
            }
            Spectrum rhs = cur[i - 1];
            for (unsigned l = 1; l <= p; ++l) {
                const double cpl = static_cast<double>(binomial(p, l));
                const auto& known = spectra[p - l][i];
                for (std::size_t q = 0; q < points; ++q)
                    rhs[q] += tau * cpl * sL[l][q] * known[q];
            }
            for (std::size_t rho = 0; rho < d1; ++rho) {
                const double xi = noise.increment(rho, i);
                if (xi == 0.0)
                    continue;
                for (std::size_t q = 0; q < points; ++q) {
                    Complex g = sM[0][rho][q] * cur[i - 1][q];
                    for (unsigned l = 1; l <= p; ++l)
                        g += static_cast<double>(binomial(p, l)) * sM[l][rho][q] *
                             spectra[p - l][i - 1][q];
                    rhs[q] += g * xi;
                }
            }
            for (std::size_t q = 0; q < points; ++q)
                rhs[q] /= 1.0 - tau * sL[0][q];
            traj.states.emplace_back(grid, ft.inverse_real(rhs));
            cur.push_back(std::move(rhs));
        }
        out.nu.push_back(std::move(traj));
    }
    return out;
}

namespace {

unsigned dyadic_ratio(const TorusGrid& fine, const TorusGrid& coarse) {
    for (unsigned j = 0; j < 31; ++j) {
        if (fine.count(0) == coarse.count(0) << j) {
            if (!(fine == coarse.refined(j)))
                break;
            return j;
        }
    }
    throw GridError("grids are not dyadically nested");
}

GridFunction restrict_to(const GridFunction& f, const TorusGrid& coarse) {
    return restrict_to_coarser(f, dyadic_ratio(f.grid(), coarse));
}

}  // namespace

Trajectory remainder(const Trajectory& vh, const Trajectory& nu0, const CorrectionSolution& corr,
                     unsigned k) {
    if (k > corr.nu.size())
        throw std::invalid_argument("remainder order exceeds the available corrections");
    const std::size_t frames = vh.states.size();
    auto check = [&](const Trajectory& t) {
        if (!(t.time_grid == vh.time_grid) || t.states.size() != frames)
            throw std::invalid_argument("trajectories use different time grids");
    };
    check(nu0);
    for (unsigned j = 0; j < k; ++j)
        check(corr.nu[j]);

    const TorusGrid* coarse = &vh.grid;
    auto consider = [&](const TorusGrid& g) {
        if (g.count(0) < coarse->count(0))
            coarse = &g;
    };
    consider(nu0.grid);
    for (unsigned j = 0; j < k; ++j)
        consider(corr.nu[j].grid);

    const double h = vh.grid.spacing();
    Trajectory out{*coarse, vh.time_grid, {}, vh.noise_fingerprint};
    out.states.reserve(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        GridFunction r = restrict_to(vh.states[i], *coarse);
        r -= restrict_to(nu0.states[i], *coarse);
        double w = 1.0;
        for (unsigned j = 1; j <= k; ++j) {
            w *= h / j;
            r.axpy(-w, restrict_to(corr.nu[j - 1].states[i], *coarse));
        }
        out.states.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

GridFunction directional_derivative(const GridFunction& f, const Offset& lambda, unsigned order) {
    return apply_multiplier(f, [&](std::span<const double> k) {
        return power(directional_symbol(lambda, k), order);
    });
}

GridFunction difference(const GridFunction& f, const Offset& lambda, double h) {
    if (is_zero(lambda))
        return f;
    GridFunction out = shift(f, lambda, h > 0 ? 1 : -1);
    out -= f;
    out *= 1.0 / h;
    return out;
}

double sobolev_norm(const GridFunction& f, double s) {
    const auto& grid = f.grid();
    FourierTransform ft(grid);
    const auto spec = ft.forward(f.values());
    double sum = 0.0;
    for (std::size_t q = 0; q < spec.size(); ++q) {
        double k2 = 0.0;
        for (double kv : wavevector(grid, q))
            k2 += kv * kv;
        sum += std::pow(1.0 + k2, s) * std::norm(spec[q]);
    }
    const double cell = std::pow(grid.spacing(), grid.dimension());
    return std::sqrt(cell * sum / static_cast<double>(spec.size()));
}

}  // namespace

TaylorCheck taylor_single_difference(const GridFunction& phi, const Offset& lambda, unsigned p) {
    const double h = phi.grid().spacing();
    GridFunction r = difference(phi, lambda, h);
    for (unsigned j = 0; j <= p; ++j)
        r.axpy(-std::pow(h, j) / factorial_value(j + 1), directional_derivative(phi, lambda, j + 1));
    TaylorCheck out;
    out.remainder = l2_grid_norm(r);
    const double top = l2_grid_norm(directional_derivative(phi, lambda, p + 2));
    out.bound = std::pow(h, p + 1) / factorial_value(p + 2) * top;
    out.constant = top == 0.0 ? 0.0 : out.remainder / (std::pow(h, p + 1) * top);
    return out;
}

TaylorCheck taylor_double_difference(const GridFunction& psi, const Offset& lambda,
                                     const Offset& mu, unsigned p) {
    const double h = psi.grid().spacing();
    GridFunction r = difference(difference(psi, mu, -h), lambda, h);
    for (unsigned i = 0; i <= p; ++i) {
        for (unsigned j = 0; j <= i; ++j) {
            const GridFunction term =
                directional_derivative(directional_derivative(psi, mu, i - j + 1), lambda, j + 1);
            r.axpy(-std::pow(h, i) * coeff_A_value(i, j), term);
        }
    }
    TaylorCheck out;
    out.remainder = l2_grid_norm(r);
    const double ref = sobolev_norm(psi, static_cast<double>(p + 3));
    out.constant = ref == 0.0 ? 0.0 : out.remainder / (std::pow(h, p + 1) * ref);
    return out;
}

}  // namespace spde
