#include "spde/scheme.hpp"

#include "binary_io.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace spde {

void SchemeProblem::validate() const {
    const auto& g = grid();
    const std::size_t n = time_grid.steps();
    if (coefficients.steps() != n)
        throw std::invalid_argument("coefficient time indices do not span the time grid");
    if (!(initial.grid() == g))
        throw std::invalid_argument("initial condition lives on a different grid");
    if (!free_terms.f.empty()) {
        if (free_terms.f.size() != n + 1)
            throw std::invalid_argument("free term f needs one field per time index 0..n");
        for (const auto& f : free_terms.f)
            if (!(f.grid() == g))
                throw std::invalid_argument("free term f lives on a different grid");
    }
    if (!free_terms.g.empty()) {
        if (free_terms.g.size() != noise_dim())
            throw std::invalid_argument("free term g needs one sequence per noise index");
        for (const auto& seq : free_terms.g) {
            if (seq.size() != n + 1)
                throw std::invalid_argument("free term g needs one field per time index 0..n");
            for (const auto& gi : seq)
                if (!(gi.grid() == g))
                    throw std::invalid_argument("free term g lives on a different grid");
        }
    }
}

SchemeProblem make_scheme_problem(const ContinuousCoefficients& c, const Stencil& stencil,
                                  const TorusGrid& grid, const TimeGrid& tg) {
    auto dc = build_discrete_from_continuous(c, stencil, grid, tg);
    auto at = [&grid](const Field& field, double t) {
        return GridFunction::sample(grid, [&](std::span<const double> x) { return field(t, x); });
    };
    FreeTerms terms;
    if (!c.f_field().is_zero())
        for (std::size_t i = 0; i <= tg.steps(); ++i)
            terms.f.push_back(at(c.f_field(), tg.time(i)));
    bool any_g = false;
    for (std::size_t rho = 0; rho < c.noise_dim(); ++rho)
        any_g = any_g || !c.g_field(rho).is_zero();
    if (any_g) {
        terms.g.resize(c.noise_dim());
        for (std::size_t rho = 0; rho < c.noise_dim(); ++rho)
            for (std::size_t i = 0; i <= tg.steps(); ++i)
                terms.g[rho].push_back(at(c.g_field(rho), tg.time(i)));
    }
    SchemeProblem problem{std::move(dc), tg, at(c.u0_field(), 0.0), std::move(terms)};
    problem.validate();
    return problem;
}

// ---------------------------------------------------------------------------

namespace {

Offset difference(const Offset& a, const Offset& b) {
    Offset out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        out[k] = a[k] - b[k];
    return out;
}

// (delta_{h,lambda} delta_{-h,mu} phi)(x_p) as a list of (column, weight) terms
template <class Visit>
void double_difference_terms(const TorusGrid& grid, std::size_t p, const Offset& lambda,
                             const Offset& mu, double h, Visit&& visit) {
    const bool l0 = is_zero(lambda), m0 = is_zero(mu);
    if (l0 && m0) {
        visit(p, 1.0);
    } else if (l0) {
        visit(p, 1.0 / h);
        visit(grid.shifted(p, mu, -1), -1.0 / h);
    } else if (m0) {
        visit(grid.shifted(p, lambda), 1.0 / h);
        visit(p, -1.0 / h);
    } else {
        const double w = 1.0 / (h * h);
        visit(grid.shifted(p, lambda), w);
        visit(grid.shifted(p, difference(lambda, mu)), -w);
        visit(p, -w);
        visit(grid.shifted(p, mu, -1), w);
    }
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

void require_same_grid(const DiscreteCoefficients& dc, const GridFunction& phi) {
    if (!(dc.grid() == phi.grid()))
        throw std::invalid_argument("grid function does not live on the coefficient grid");
}

}  // namespace

GridFunction apply_Lh(const DiscreteCoefficients& dc, std::size_t i, const GridFunction& phi) {
    require_same_grid(dc, phi);
    const auto& grid = dc.grid();
    const auto& stencil = dc.stencil();
    const double h = grid.spacing();
    GridFunction out(grid);
    for (std::size_t l = 0; l < stencil.size(); ++l) {
        for (std::size_t m = 0; m < stencil.size(); ++m) {
            if (dc.a_is_zero(i, l, m))
                continue;
            for (std::size_t p = 0; p < phi.size(); ++p) {
                double acc = 0.0;
                double_difference_terms(grid, p, stencil[l], stencil[m], h,
                                        [&](std::size_t q, double w) { acc += w * phi[q]; });
                out[p] += dc.a(i, l, m, p) * acc;
            }
        }
    }
    return out;
}

GridFunction apply_Mh(const DiscreteCoefficients& dc, std::size_t i, std::size_t rho,
                      const GridFunction& phi) {
    require_same_grid(dc, phi);
    if (rho >= dc.noise_dim())
        throw std::out_of_range("noise index out of range");
    const auto& grid = dc.grid();
    const auto& stencil = dc.stencil();
    const double h = grid.spacing();
    GridFunction out(grid);
    for (std::size_t l = 0; l < stencil.size(); ++l) {
        if (dc.b_is_zero(i, l, rho))
            continue;
        const bool zero = is_zero(stencil[l]);
        for (std::size_t p = 0; p < phi.size(); ++p) {
            const double d = zero ? phi[p] : (phi[grid.shifted(p, stencil[l])] - phi[p]) / h;
            out[p] += dc.b(i, l, rho, p) * d;
        }
    }
    return out;
}

double tau_operator_bound(const DiscreteCoefficients& dc, std::size_t i, double tau) {
    const auto& stencil = dc.stencil();
    const double h = dc.grid().spacing();
    const std::size_t points = dc.constant_in_x() ? 1 : dc.grid().point_count();
    double bound = 0.0;
    for (std::size_t l = 0; l < stencil.size(); ++l) {
        for (std::size_t m = 0; m < stencil.size(); ++m) {
            double amax = 0.0;
            for (std::size_t p = 0; p < points; ++p)
                amax = std::max(amax, std::abs(dc.a(i, l, m, p)));
            const double nl = is_zero(stencil[l]) ? 1.0 : 2.0 / h;
            const double nm = is_zero(stencil[m]) ? 1.0 : 2.0 / h;
            bound += amax * nl * nm;
        }
    }
    return tau * bound;
}

double rounding_residual_floor(double tau_bound, double x_norm) {
    return 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + tau_bound) * x_norm;
}

// ---------------------------------------------------------------------------

struct ImplicitStepper::Direct {
    using Matrix = Eigen::SparseMatrix<double>;
    Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
    Matrix matrix;
    std::optional<std::size_t> factored;

    void factor(const DiscreteCoefficients& dc, std::size_t i, double tau) {
        const auto& grid = dc.grid();
        const auto& stencil = dc.stencil();
        const double h = grid.spacing();
        const auto n = static_cast<Eigen::Index>(grid.point_count());
        std::vector<Eigen::Triplet<double>> triplets;
        for (Eigen::Index p = 0; p < n; ++p)
            triplets.emplace_back(p, p, 1.0);
        for (std::size_t l = 0; l < stencil.size(); ++l) {
            for (std::size_t m = 0; m < stencil.size(); ++m) {
                if (dc.a_is_zero(i, l, m))
                    continue;
                for (std::size_t p = 0; p < grid.point_count(); ++p) {
                    const double c = -tau * dc.a(i, l, m, p);
                    double_difference_terms(grid, p, stencil[l], stencil[m], h,
                                            [&](std::size_t q, double w) {
                                                triplets.emplace_back(static_cast<Eigen::Index>(p),
                                                                      static_cast<Eigen::Index>(q), c * w);
                                            });
                }
            }
        }
        matrix.resize(n, n);
        matrix.setFromTriplets(triplets.begin(), triplets.end());
        matrix.makeCompressed();
        lu.compute(matrix);
        if (lu.info() != Eigen::Success)
            throw SolverError("sparse LU factorisation of Id - tau L^h failed", 0, 0.0);
        factored = dc.time_invariant() ? 0 : i;
    }
};

ImplicitStepper::ImplicitStepper(const SchemeProblem& problem, LinearSolveConfig cfg)
    : problem_(&problem), cfg_(cfg) {
    cfg_.validate();
    problem.validate();
    if (cfg_.method == SolverMethod::banded_direct) {
        if (problem.grid().dimension() != 1)
            throw std::invalid_argument("the banded direct solver is available for d = 1 only");
        direct_ = std::make_unique<Direct>();
    }

    const auto& dc = problem.coefficients;
    const double tau = problem.time_grid.tau();
    const std::size_t slices = dc.time_invariant() ? 1 : dc.steps() + 1;
    for (std::size_t i = 0; i < slices && tau > 0.0; ++i) {
        const double bound = tau_operator_bound(dc, i, tau);
        double a00 = 0.0;
        const std::size_t points = dc.constant_in_x() ? 1 : dc.grid().point_count();
        for (std::size_t p = 0; p < points; ++p)
            a00 = std::max(a00, dc.a(i, 0, 0, p));
        std::vector<GridSample> samples;
        for (std::size_t p = 0; p < points; ++p)
            samples.push_back({i, p});
        const bool parabolic = check_parabolicity_discrete(dc, samples, 0.0).worst_margin > 0.0;
        if ((!parabolic && bound >= 1.0) || tau * a00 >= 1.0) {
            std::ostringstream msg;
            msg << "time index " << i << ": tau may be too large for Id - tau L^h to be invertible"
                << " (tau*||L^h|| bound " << bound << ", tau*max a00 " << tau * a00 << ")";
            warnings_.push_back(msg.str());
            break;
        }
    }
}

ImplicitStepper::~ImplicitStepper() = default;
ImplicitStepper::ImplicitStepper(ImplicitStepper&&) noexcept = default;
ImplicitStepper& ImplicitStepper::operator=(ImplicitStepper&&) noexcept = default;

GridFunction ImplicitStepper::right_hand_side(const GridFunction& previous, std::size_t i,
                                              std::span<const double> xi) const {
    const auto& pb = *problem_;
    const double tau = pb.time_grid.tau();
    GridFunction rhs = previous;
    if (!pb.free_terms.f.empty())
        rhs.axpy(tau, pb.free_terms.f[i]);
    for (std::size_t rho = 0; rho < pb.noise_dim(); ++rho) {
        if (xi[rho] == 0.0)
            continue;
        rhs.axpy(xi[rho], apply_Mh(pb.coefficients, i - 1, rho, previous));
        if (!pb.free_terms.g.empty())
            rhs.axpy(xi[rho], pb.free_terms.g[rho][i - 1]);
    }
    return rhs;
}

GridFunction ImplicitStepper::step(const GridFunction& previous, std::size_t i,
                                   std::span<const double> xi) {
    const auto& pb = *problem_;
    if (i < 1 || i > pb.time_grid.steps())
        throw std::out_of_range("step index must lie in 1..n");
    if (xi.size() != pb.noise_dim())
        throw std::invalid_argument("increment count does not match the noise dimension");
    if (!(previous.grid() == pb.grid()))
        throw std::invalid_argument("previous state lives on a different grid");

    const double tau = pb.time_grid.tau();
    const auto& dc = pb.coefficients;
    const GridFunction rhs = right_hand_side(previous, i, xi);
    const auto n = rhs.size();

    auto apply = [&](std::span<const double> x, std::span<double> y) {
        GridFunction phi(pb.grid(), std::vector<double>(x.begin(), x.end()));
        const GridFunction lphi = apply_Lh(dc, i, phi);
        for (std::size_t k = 0; k < n; ++k)
            y[k] = x[k] - tau * lphi[k];
    };

    GridFunction v = previous;  // warm start
    const double rhs_norm = norm2(rhs.values());
    const double tau_bound = tau_operator_bound(dc, i, tau);
    LinearSolveConfig local = cfg_;
    // consecutive states have comparable norms, so v_{i-1} sizes the floor
    local.residual_floor = rounding_residual_floor(tau_bound, std::max(norm2(previous.values()), rhs_norm));

    switch (cfg_.method) {
    case SolverMethod::gmres:
    case SolverMethod::bicgstab: {
        const auto res = cfg_.method == SolverMethod::gmres ? gmres(apply, rhs.values(), v.values(), local)
                                                            : bicgstab(apply, rhs.values(), v.values(), local);
        last_ = {res.iterations, res.relative_residual,
                 res.relative_residual > cfg_.tolerance};
        break;
    }
    case SolverMethod::banded_direct: {
        const std::size_t key = dc.time_invariant() ? 0 : i;
        if (direct_->factored != key)
            direct_->factor(dc, i, tau);
        Eigen::Map<const Eigen::VectorXd> b(rhs.values().data(), static_cast<Eigen::Index>(n));
        Eigen::Map<Eigen::VectorXd> x(v.values().data(), static_cast<Eigen::Index>(n));
        x = direct_->lu.solve(b);
        std::size_t refinements = 0;
        std::vector<double> r(n);
        for (;;) {
            apply(v.values(), r);
            for (std::size_t q = 0; q < n; ++q)
                r[q] = rhs[q] - r[q];
            const double rn = norm2(r);
            const double rel = rhs_norm == 0.0 ? 0.0 : rn / rhs_norm;
            const double floor = rounding_residual_floor(tau_bound, norm2(v.values()));
            last_ = {refinements, rel, rel > cfg_.tolerance};
            if (rn <= std::max(cfg_.tolerance * rhs_norm, floor))
                break;
            if (refinements == 3)
                throw SolverError("direct solve missed the residual tolerance", refinements, rel);
            Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n));
            x += direct_->lu.solve(rv);
            ++refinements;
        }
        break;
    }
    }
    if (!v.all_finite())
        throw SolverError("scheme step produced non-finite values", last_.iterations,
                          last_.relative_residual);
    return v;
}

GridFunction implicit_step(const GridFunction& previous, std::size_t i, std::span<const double> xi,
                           const SchemeProblem& problem, const LinearSolveConfig& cfg) {
    ImplicitStepper stepper(problem, cfg);
    return stepper.step(previous, i, xi);
}

void solve_trajectory_streaming(const SchemeProblem& problem, const NoisePath& noise,
                                const LinearSolveConfig& cfg,
                                const std::function<void(std::size_t, const GridFunction&)>& visit) {
    if (noise.noise_dim() != problem.noise_dim() || noise.steps() != problem.time_grid.steps())
        throw std::invalid_argument("noise path does not match (d1, n) of the problem");
    ImplicitStepper stepper(problem, cfg);
    GridFunction v = problem.initial;
    visit(0, v);
    for (std::size_t i = 1; i <= problem.time_grid.steps(); ++i) {
        const auto xi = noise.step_increments(i);
        v = stepper.step(v, i, xi);
        visit(i, v);
    }
}

Trajectory solve_trajectory(const SchemeProblem& problem, const NoisePath& noise,
                            const LinearSolveConfig& cfg) {
    Trajectory traj{problem.grid(), problem.time_grid, {}, noise.fingerprint()};
    traj.states.reserve(problem.time_grid.steps() + 1);
    solve_trajectory_streaming(problem, noise, cfg,
                               [&traj](std::size_t, const GridFunction& v) { traj.states.push_back(v); });
    return traj;
}

// ---------------------------------------------------------------------------

Complex discrete_L_symbol(const DiscreteCoefficients& dc, std::size_t i, std::span<const double> k) {
    const auto& stencil = dc.stencil();
    const double h = dc.grid().spacing();
    Complex sum = 0.0;
    for (std::size_t l = 0; l < stencil.size(); ++l)
        for (std::size_t m = 0; m < stencil.size(); ++m)
            if (!dc.a_is_zero(i, l, m))
                sum += dc.a(i, l, m, 0) * difference_symbol(stencil[l], h, k) *
                       difference_symbol(stencil[m], -h, k);
    return sum;
}

Complex discrete_M_symbol(const DiscreteCoefficients& dc, std::size_t i, std::size_t rho,
                          std::span<const double> k) {
    const auto& stencil = dc.stencil();
    const double h = dc.grid().spacing();
    Complex sum = 0.0;
    for (std::size_t l = 0; l < stencil.size(); ++l)
        if (!dc.b_is_zero(i, l, rho))
            sum += dc.b(i, l, rho, 0) * difference_symbol(stencil[l], h, k);
    return sum;
}

Complex continuous_L_symbol(const ContinuousCoefficients& c, double t, std::span<const double> k) {
    const int d = c.dimension();
    const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
    Complex sum = c.a(0, 0, t, origin);
    for (int beta = 1; beta <= d; ++beta) {
        const double kb = k[static_cast<std::size_t>(beta - 1)];
        sum += Complex(0.0, (c.a(0, beta, t, origin) + c.a(beta, 0, t, origin)) * kb);
        for (int alpha = 1; alpha <= d; ++alpha)
            sum -= c.a(alpha, beta, t, origin) * k[static_cast<std::size_t>(alpha - 1)] * kb;
    }
    return sum;
}

Complex continuous_M_symbol(const ContinuousCoefficients& c, std::size_t rho, double t,
                            std::span<const double> k) {
    const int d = c.dimension();
    const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
    Complex sum = c.b(0, rho, t, origin);
    for (int alpha = 1; alpha <= d; ++alpha)
        sum += Complex(0.0, c.b(alpha, rho, t, origin) * k[static_cast<std::size_t>(alpha - 1)]);
    return sum;
}

namespace {

// Shared per-mode recursion for the two Fourier solvers.
template <class LSymbol, class MSymbol>
Trajectory spectral_recursion(const TorusGrid& grid, const TimeGrid& tg, const NoisePath& noise,
                              const GridFunction& initial, const FreeTerms& terms,
                              bool time_invariant, LSymbol&& l_symbol, MSymbol&& m_symbol) {
    const std::size_t d1 = noise.noise_dim();
    const double tau = tg.tau();
    FourierTransform ft(grid);
    Spectrum v = ft.forward(initial.values());
    Trajectory traj{grid, tg, {initial}, noise.fingerprint()};
    traj.states.reserve(tg.steps() + 1);

    std::vector<Complex> sigma_l;
    std::vector<std::vector<Complex>> sigma_m(d1);
    for (std::size_t i = 1; i <= tg.steps(); ++i) {
        if (i == 1 || !time_invariant) {
            sigma_l = tabulate_symbol(grid, [&](std::span<const double> k) { return l_symbol(i, k); });
            for (std::size_t rho = 0; rho < d1; ++rho)
                sigma_m[rho] = tabulate_symbol(
                    grid, [&](std::span<const double> k) { return m_symbol(i - 1, rho, k); });
        }
        Spectrum rhs = v;
        if (!terms.f.empty()) {
            const auto fh = ft.forward(terms.f[i].values());
            for (std::size_t p = 0; p < rhs.size(); ++p)
                rhs[p] += tau * fh[p];
        }
        for (std::size_t rho = 0; rho < d1; ++rho) {
            const double xi = noise.increment(rho, i);
            if (xi == 0.0)
                continue;
            for (std::size_t p = 0; p < rhs.size(); ++p)
                rhs[p] += sigma_m[rho][p] * v[p] * xi;
            if (!terms.g.empty()) {
                const auto gh = ft.forward(terms.g[rho][i - 1].values());
                for (std::size_t p = 0; p < rhs.size(); ++p)
                    rhs[p] += gh[p] * xi;
            }
        }
        for (std::size_t p = 0; p < rhs.size(); ++p)
            v[p] = rhs[p] / (1.0 - tau * sigma_l[p]);
        traj.states.emplace_back(grid, ft.inverse_real(v));
    }
    return traj;
}

}  // namespace

Trajectory solve_discrete_spectral(const SchemeProblem& problem, const NoisePath& noise) {
    problem.validate();
    const auto& dc = problem.coefficients;
    if (!dc.constant_in_x())
        throw NotConstantCoefficients("the Fourier solver needs coefficients constant in x");
    if (noise.noise_dim() != problem.noise_dim() || noise.steps() != problem.time_grid.steps())
        throw std::invalid_argument("noise path does not match (d1, n) of the problem");
    return spectral_recursion(
        problem.grid(), problem.time_grid, noise, problem.initial, problem.free_terms,
        dc.time_invariant(),
        [&](std::size_t i, std::span<const double> k) { return discrete_L_symbol(dc, i, k); },
        [&](std::size_t i, std::size_t rho, std::span<const double> k) {
            return discrete_M_symbol(dc, i, rho, k);
        });
}

Trajectory solve_time_scheme_spectral(const ContinuousCoefficients& c, const TorusGrid& grid,
                                      const TimeGrid& tg, const NoisePath& noise) {
    if (!c.constant_in_x())
        throw NotConstantCoefficients("the time scheme is solved in Fourier space only for "
                                      "coefficients constant in x");
    if (c.dimension() != grid.dimension())
        throw std::invalid_argument("coefficient and grid dimensions differ");
    if (noise.noise_dim() != c.noise_dim() || noise.steps() != tg.steps())
        throw std::invalid_argument("noise path does not match (d1, n)");

    auto at = [&grid](const Field& field, double t) {
        return GridFunction::sample(grid, [&](std::span<const double> x) { return field(t, x); });
    };
    FreeTerms terms;
    if (!c.f_field().is_zero())
        for (std::size_t i = 0; i <= tg.steps(); ++i)
            terms.f.push_back(at(c.f_field(), tg.time(i)));
    bool any_g = false;
    for (std::size_t rho = 0; rho < c.noise_dim(); ++rho)
        any_g = any_g || !c.g_field(rho).is_zero();
    if (any_g) {
        terms.g.resize(c.noise_dim());
        for (std::size_t rho = 0; rho < c.noise_dim(); ++rho)
            for (std::size_t i = 0; i <= tg.steps(); ++i)
                terms.g[rho].push_back(at(c.g_field(rho), tg.time(i)));
    }
    return spectral_recursion(
        grid, tg, noise, at(c.u0_field(), 0.0), terms, c.time_invariant(),
        [&](std::size_t i, std::span<const double> k) { return continuous_L_symbol(c, tg.time(i), k); },
        [&](std::size_t i, std::size_t rho, std::span<const double> k) {
            return continuous_M_symbol(c, rho, tg.time(i), k);
        });
}

// ---------------------------------------------------------------------------

void write_trajectory(const Trajectory& traj, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out.write("SPDETRAJ", 8);
    io::write_u32(out, static_cast<std::uint32_t>(traj.grid.dimension()));
    for (auto c : traj.grid.counts())
        io::write_u32(out, static_cast<std::uint32_t>(c));
    io::write_u32(out, static_cast<std::uint32_t>(traj.time_grid.steps()));
    io::write_f64(out, traj.time_grid.tau());
    io::write_f64(out, traj.grid.side_length(0));
    for (const auto& state : traj.states)
        for (double v : state.values())
            io::write_f64(out, v);
    if (!out)
        throw std::runtime_error("failed writing " + file.string());
}

Trajectory read_trajectory(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "SPDETRAJ", 8) != 0)
        throw std::runtime_error(file.string() + " is not a trajectory file");
    const std::uint32_t d = io::read_u32(in);
    if (d == 0 || d > 16)
        throw std::runtime_error(file.string() + ": implausible dimension");
    std::vector<std::size_t> counts(d);
    for (auto& c : counts)
        c = io::read_u32(in);
    const std::uint32_t n = io::read_u32(in);
    const double tau = io::read_f64(in);
    const double side0 = io::read_f64(in);
    if (!in)
        throw std::runtime_error(file.string() + " has a truncated header");
    const double h = side0 / static_cast<double>(counts[0]);
    std::vector<double> sides(d);
    for (std::size_t a = 0; a < d; ++a)
        sides[a] = a == 0 ? side0 : h * static_cast<double>(counts[a]);
    TorusGrid grid(sides, counts);
    // the horizon of a zero-step grid is not recorded
    TimeGrid tg(n > 0 ? tau * n : 1.0, n);
    Trajectory traj{grid, tg, {}, std::nullopt};
    for (std::uint32_t i = 0; i <= n; ++i) {
        std::vector<double> values(grid.point_count());
        for (auto& v : values)
            v = io::read_f64(in);
        if (!in)
            throw std::runtime_error(file.string() + " is truncated");
        traj.states.emplace_back(grid, std::move(values));
    }
    return traj;
}

}  // namespace spde
