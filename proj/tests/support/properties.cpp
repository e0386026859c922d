#include "properties.hpp"

#include "oracles.hpp"

#include "spde/coefficients.hpp"
#include "spde/expansion.hpp"
#include "spde/noise.hpp"
#include "spde/richardson.hpp"
#include "spde/scheme.hpp"
#include "spde/stencil_grid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace spde::property {

namespace {

GridFunction random_function(const TorusGrid& grid, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(grid.point_count());
    for (auto& x : v)
        x = u(gen);
    return GridFunction(grid, std::move(v));
}

double inner(const GridFunction& f, const GridFunction& g) {
    double s = 0.0;
    for (std::size_t p = 0; p < f.size(); ++p)
        s += f[p] * g[p];
    return s;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) { return sup_grid_norm(a - b); }

Result make(std::string name, bool pass, const std::string& detail) {
    return {std::move(name), pass, detail};
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

Stencil plane_stencil() { return Stencil(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {-1, 2}}); }

ContinuousCoefficients heat_with_noise(double a, double b) {
    ContinuousCoefficients c(1, 1);
    c.set_a(1, 1, Field::constant(a));
    c.set_b(1, 0, Field::constant(b));
    c.set_u0(Field::function(
        [](double, std::span<const double> x) {
            return std::sin(2.0 * std::numbers::pi * x[0]) + 0.3 * std::cos(6.0 * std::numbers::pi * x[0]);
        },
        false, true));
    return c;
}

}  // namespace

Result adjoint_identity() {
    const TorusGrid grid(2, 1.0, 16);
    const auto stencil = plane_stencil();
    const auto f = random_function(grid, 1), g = random_function(grid, 2);
    const double h = grid.spacing();
    double worst = 0.0;
    for (const auto& lambda : stencil.offsets()) {
        if (is_zero(lambda))
            continue;
        const double lhs = inner(f, diff(g, stencil, lambda, h));
        const double rhs = -inner(diff(f, stencil, lambda, -h), g);
        worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(lhs) + 1.0));
    }
    return make("adjoint identity <f, d_{h,l} g> = -<d_{-h,l} f, g>", worst < 1e-12,
                "worst relative gap " + fmt(worst));
}

Result product_rule() {
    const TorusGrid grid(2, 1.0, 16);
    const auto stencil = plane_stencil();
    const auto f = random_function(grid, 3), g = random_function(grid, 4);
    const double h = grid.spacing();
    double worst = 0.0;
    for (const auto& lambda : stencil.offsets()) {
        if (is_zero(lambda))
            continue;
        const auto lhs = diff(f * g, stencil, lambda, h);
        const auto rhs = diff(f, stencil, lambda, h) * g + shift(f, lambda) * diff(g, stencil, lambda, h);
        worst = std::max(worst, max_abs_diff(lhs, rhs) * h);
    }
    return make("product rule d(fg) = (df) g + (T f)(dg)", worst < 1e-13, "worst gap * h " + fmt(worst));
}

Result linearity() {
    const TorusGrid grid(1, 1.0, 32);
    const auto stencil = Stencil::coordinate(1);
    const TimeGrid tg(0.5, 4);
    Eigen::MatrixXd a(2, 2), b(2, 1);
    a << 0.3, 0.5, 0.5, 1.2;
    b << 0.1, 0.7;
    const auto dc = DiscreteCoefficients::constant(stencil, grid, tg.steps(), a, b);
    const auto f = random_function(grid, 5), g = random_function(grid, 6);
    const double alpha = 1.7, beta = -0.4;
    const auto lhs = apply_Lh(dc, 1, alpha * f + beta * g);
    const auto rhs = alpha * apply_Lh(dc, 1, f) + beta * apply_Lh(dc, 1, g);
    const auto mlhs = apply_Mh(dc, 1, 0, alpha * f + beta * g);
    const auto mrhs = alpha * apply_Mh(dc, 1, 0, f) + beta * apply_Mh(dc, 1, 0, g);

    Trajectory tf{grid, tg, {}, 1}, tg2{grid, tg, {}, 1};
    const TorusGrid fine = grid.refined(1);
    Trajectory ff{fine, tg, {}, 1}, fg{fine, tg, {}, 1};
    for (std::size_t i = 0; i <= tg.steps(); ++i) {
        tf.states.push_back(random_function(grid, 10 + i));
        tg2.states.push_back(random_function(grid, 20 + i));
        ff.states.push_back(random_function(fine, 30 + i));
        fg.states.push_back(random_function(fine, 40 + i));
    }
    const auto w = vandermonde_weights(1);
    const std::vector<Trajectory> x{tf, ff}, y{tg2, fg};
    std::vector<Trajectory> z;
    for (std::size_t l = 0; l < 2; ++l) {
        Trajectory t = x[l];
        for (std::size_t i = 0; i < t.states.size(); ++i)
            t.states[i] = alpha * x[l].states[i] + beta * y[l].states[i];
        z.push_back(t);
    }
    const auto ex = extrapolate(x, w), ey = extrapolate(y, w), ez = extrapolate(z, w);
    double traj_gap = 0.0;
    for (std::size_t i = 0; i < ez.states.size(); ++i)
        traj_gap = std::max(traj_gap, max_abs_diff(ez.states[i], alpha * ex.states[i] + beta * ey.states[i]));

    const double gap = std::max({max_abs_diff(lhs, rhs) / (sup_grid_norm(lhs) + 1.0),
                                 max_abs_diff(mlhs, mrhs) / (sup_grid_norm(mlhs) + 1.0), traj_gap});
    return make("linearity of L^h, M^h and the extrapolant", gap < 1e-12, "worst gap " + fmt(gap));
}

Result restriction_identities() {
    const TorusGrid coarse(2, 2.0, 8);
    auto fn = [](std::span<const double> x) { return std::sin(x[0]) * std::cos(2.0 * x[1]) + x[0]; };
    const auto fine = GridFunction::sample(coarse.refined(2), fn);
    const auto once = restrict_to_coarser(restrict_to_coarser(fine, 1), 1);
    const auto twice = restrict_to_coarser(fine, 2);
    const auto direct = GridFunction::sample(coarse, fn);
    bool ok = once.grid() == coarse && twice.grid() == coarse;
    double gap = std::max(max_abs_diff(once, twice), max_abs_diff(twice, direct));
    gap = std::max(gap, max_abs_diff(restrict_to_coarser(direct, 0), direct));
    ok = ok && gap == 0.0;
    return make("restriction composes and commutes with sampling", ok, "gap " + fmt(gap));
}

Result determinism() {
    const TimeGrid tg(1.0, 16);
    const auto p1 = sample_increments(tg, 1, 99), p2 = sample_increments(tg, 1, 99);
    const auto p3 = sample_increments(tg, 1, 100);
    const auto c = heat_with_noise(1.0, 1.0);
    const auto problem = make_scheme_problem(c, Stencil::coordinate(1), TorusGrid(1, 1.0, 16), tg);
    const LinearSolveConfig cfg;
    const auto t1 = solve_trajectory(problem, p1, cfg), t2 = solve_trajectory(problem, p2, cfg);
    bool same = p1 == p2 && p1.fingerprint() == p2.fingerprint() && !(p1 == p3);
    for (std::size_t i = 0; i < t1.states.size(); ++i)
        for (std::size_t q = 0; q < t1.states[i].size(); ++q)
            same = same && std::bit_cast<std::uint64_t>(t1.states[i][q]) ==
                               std::bit_cast<std::uint64_t>(t2.states[i][q]);
    return make("same seed gives bit-identical noise and trajectories", same, "");
}

Result noise_moments() {
    const std::size_t n = 1 << 15;
    const TimeGrid tg(1.0, n);
    const double tau = tg.tau();
    const auto path = sample_increments(tg, 2, 2024);
    double m1 = 0.0, m2 = 0.0, m4 = 0.0, cross = 0.0, lag = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = path.increment(0, i) / std::sqrt(tau);
        const double y = path.increment(1, i) / std::sqrt(tau);
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
        cross += x * y;
        if (i > 1)
            lag += x * path.increment(0, i - 1) / std::sqrt(tau);
    }
    const double N = static_cast<double>(n);
    m1 /= N;
    m2 /= N;
    m4 /= N;
    cross /= N;
    lag /= N - 1.0;
    // standard errors: mean 1/sqrt(N), variance sqrt(2/N), fourth moment sqrt(96/N)
    const double s = 1.0 / std::sqrt(N);
    const bool ok = std::abs(m1) < 5 * s && std::abs(m2 - 1.0) < 5 * std::sqrt(2.0) * s &&
                    std::abs(m4 - 3.0) < 5 * std::sqrt(96.0) * s && std::abs(cross) < 5 * s &&
                    std::abs(lag) < 5 * s;
    return make("increments are centred with variance tau, Gaussian kurtosis and no correlation", ok,
                "mean " + fmt(m1) + ", var/tau " + fmt(m2) + ", m4 " + fmt(m4) + ", cross " + fmt(cross) +
                    ", lag-1 " + fmt(lag));
}

Result parabolicity_monotonicity() {
    const TorusGrid grid(1, 1.0, 8);
    const TimeGrid tg(1.0, 4);
    const std::vector<SpaceTimePoint> samples{{0.0, {0.0}}};
    double previous = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double b : {0.0, 0.3, 0.6, 0.9, 1.2, 1.5}) {
        const auto r = check_parabolicity_continuous(heat_with_noise(1.0, b), samples, 0.0);
        ok = ok && r.worst_margin <= previous;
        previous = r.worst_margin;
    }
    double prev_a = -std::numeric_limits<double>::infinity();
    for (double a : {0.5, 1.0, 2.0, 4.0}) {
        const auto dc = build_discrete_from_continuous(heat_with_noise(a, 1.0), Stencil::coordinate(1), grid, tg);
        const auto r = check_parabolicity_discrete(dc, default_discrete_samples(dc), 0.0);
        ok = ok && r.worst_margin >= prev_a;
        prev_a = r.worst_margin;
    }
    return make("parabolicity margin falls with |b| and grows with a", ok, "");
}

Result residual_contract() {
    const TorusGrid grid(1, 1.0, 32);
    const TimeGrid tg(0.25, 8);
    auto c = heat_with_noise(1.0, 1.0);
    c.set_a(0, 1, Field::constant(0.4));
    c.set_a(0, 0, Field::constant(-0.3));
    const auto problem = make_scheme_problem(c, Stencil::coordinate(1), grid, tg);
    const auto noise = sample_increments(tg, 1, 5);
    double worst = 0.0;
    for (auto method : {SolverMethod::gmres, SolverMethod::bicgstab, SolverMethod::banded_direct}) {
        LinearSolveConfig cfg;
        cfg.method = method;
        ImplicitStepper stepper(problem, cfg);
        GridFunction v = problem.initial;
        for (std::size_t i = 1; i <= tg.steps(); ++i) {
            const auto xi = noise.step_increments(i);
            const auto rhs = stepper.right_hand_side(v, i, xi);
            const auto next = stepper.step(v, i, xi);
            GridFunction r = next;
            r.axpy(-tg.tau(), apply_Lh(problem.coefficients, i, next));
            r -= rhs;
            worst = std::max(worst, l2_grid_norm(r) / l2_grid_norm(rhs));
            v = next;
        }
    }
    return make("every implicit step meets the relative residual tolerance", worst <= 1e-12,
                "worst relative residual " + fmt(worst));
}

Result oracle_equivalence() {
    const TimeGrid tg(0.5, 8);
    const auto c = heat_with_noise(1.0, 1.0);
    double worst = 0.0;
    for (std::size_t n : {16, 32}) {
        const auto problem = make_scheme_problem(c, Stencil::coordinate(1), TorusGrid(1, 1.0, n), tg);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto noise = sample_increments(tg, 1, seed);
            const auto a = solve_trajectory(problem, noise, LinearSolveConfig{});
            const auto b = solve_discrete_spectral(problem, noise);
            for (std::size_t i = 0; i < a.states.size(); ++i)
                worst = std::max(worst, max_abs_diff(a.states[i], b.states[i]));
        }
    }
    return make("physical and spectral discrete solvers agree", worst <= 1e-9, "sup gap " + fmt(worst));
}

Result stability_witness() {
    const TorusGrid grid(2, 1.0, 12);
    const TimeGrid tg(0.5, 20);
    ContinuousCoefficients c(2, 1);
    c.set_a(1, 1, Field::constant(1.0));
    c.set_a(2, 2, Field::constant(0.5));
    c.set_u0(Field::function([](double, std::span<const double> x) {
        return std::sin(2.0 * std::numbers::pi * x[0]) + std::cos(4.0 * std::numbers::pi * x[1]) + 0.2;
    }, false, true));
    const auto problem = make_scheme_problem(c, Stencil::coordinate(2), grid, tg);
    const auto traj = solve_trajectory(problem, zero_noise(tg, 1), LinearSolveConfig{});
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double grow = l2_grid_norm(traj.states[i]) - l2_grid_norm(traj.states[i - 1]);
        worst = std::max(worst, grow);
        ok = ok && grow <= 1e-12;
    }
    return make("l2 norm is non-increasing without noise and free terms", ok, "largest growth " + fmt(worst));
}

Result weight_identities() {
    double worst = 0.0;
    for (unsigned k = 0; k <= max_richardson_order; ++k) {
        const auto w = vandermonde_weights(k);
        const auto m = weight_moments(w);
        worst = std::max(worst, std::abs(m[0] - 1.0));
        for (std::size_t i = 1; i < m.size(); ++i)
            worst = std::max(worst, std::abs(m[i]));
    }
    return make("Richardson weights satisfy the moment identities for k <= 12", worst <= 1e-12,
                "worst moment error " + fmt(worst));
}

Result extrapolation_annihilation() {
    const TorusGrid grid(1, 1.0, 8);
    const TimeGrid tg(1.0, 3);
    const unsigned k = 2;
    auto field = [](double s) {
        return [s](std::span<const double> x) { return std::sin(2.0 * std::numbers::pi * x[0] + s); };
    };
    std::vector<Trajectory> levels;
    for (unsigned j = 0; j <= k; ++j) {
        const auto g = grid.refined(j);
        const double h = g.spacing();
        Trajectory t{g, tg, {}, 7};
        for (std::size_t i = 0; i <= tg.steps(); ++i) {
            auto v = GridFunction::sample(g, field(0.1 * i));
            for (unsigned q = 1; q <= k; ++q)
                v.axpy(std::pow(h, q), GridFunction::sample(g, field(q + 0.3 * i)));
            t.states.push_back(v);
        }
        levels.push_back(t);
    }
    const auto vbar = extrapolate(levels, vandermonde_weights(k));
    double worst = 0.0;
    for (std::size_t i = 0; i <= tg.steps(); ++i)
        worst = std::max(worst, max_abs_diff(vbar.states[i], GridFunction::sample(grid, field(0.1 * i))));
    return make("extrapolation removes the h and h^2 terms", worst <= 1e-10, "residual " + fmt(worst));
}

Result correction_coefficients_exact() {
    bool ok = true;
    double worst = 0.0;
    for (unsigned p = 0; p <= 8; ++p) {
        for (unsigned j = 0; j <= p; ++j) {
            const auto r = coeff_A(p, j);
            const double exact = static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
            worst = std::max(worst, std::abs(exact - coeff_A_value(p, j)) / std::abs(exact));
        }
        for (std::int64_t a : {1, 2, 3})
            for (std::int64_t b : {1, 2, -1}) {
                oracle::Exact sum = 0;
                for (unsigned j = 0; j <= p; ++j) {
                    const auto r = coeff_A(p, j);
                    oracle::Exact term(r.numerator(), r.denominator());
                    for (unsigned q = 0; q <= j; ++q)
                        term *= a;
                    for (unsigned q = 0; q <= p - j; ++q)
                        term *= b;
                    sum += term;
                }
                oracle::Exact fact = 1;
                for (unsigned q = 2; q <= p + 2; ++q)
                    fact *= q;
                ok = ok && sum * fact == oracle::double_difference_monomial_coefficient(p, a, b);
            }
    }
    ok = ok && worst <= 1e-15;
    return make("A_{p,j} matches the series of the double difference exactly", ok,
                "float vs rational " + fmt(worst));
}

std::vector<Result> run_all() {
    return {adjoint_identity(),   product_rule(),        linearity(),
            restriction_identities(), determinism(),     noise_moments(),
            parabolicity_monotonicity(), residual_contract(), oracle_equivalence(),
            stability_witness(),  weight_identities(),   extrapolation_annihilation(),
            correction_coefficients_exact()};
}

}  // namespace spde::property
