#include "oracles.hpp"

#include "spde/linear_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spde;

namespace {

struct Dense {
    std::vector<std::vector<double>> a;
    LinearMap map() const {
        return [this](std::span<const double> x, std::span<double> y) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < x.size(); ++j)
                    s += a[i][j] * x[j];
                y[i] = s;
            }
        };
    }
};

Dense random_diagonally_dominant(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dense d{std::vector<std::vector<double>>(n, std::vector<double>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            d.a[i][j] = u(gen);
        d.a[i][i] += double(n);
    }
    return d;
}

}  // namespace

TEST_SUITE("linear_solver") {

TEST_CASE("method names") {
    for (auto m : {SolverMethod::gmres, SolverMethod::bicgstab, SolverMethod::banded_direct})
        CHECK(solver_method_from_string(to_string(m)) == m);
    CHECK(solver_method_from_string("direct") == SolverMethod::banded_direct);
    CHECK_THROWS(solver_method_from_string("cg"));
}

TEST_CASE("config validation") {
    LinearSolveConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.tolerance = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg.tolerance = 1e-10;
    cfg.restart = 0;
    CHECK_THROWS(cfg.validate());
    cfg.restart = 5;
    cfg.residual_floor = -1.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("Krylov solvers agree with dense elimination") {
    for (unsigned seed = 0; seed < 5; ++seed) {
        const std::size_t n = 40;
        const auto A = random_diagonally_dominant(n, seed);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i)
            b[i] = std::sin(double(i) + seed);
        const auto exact = oracle::dense_solve(A.a, b);
        for (auto solve : {&gmres, &bicgstab}) {
            LinearSolveConfig cfg;
            cfg.restart = 7;
            std::vector<double> x(n, 0.0);
            const auto r = solve(A.map(), b, x, cfg);
            CHECK(r.relative_residual <= 1e-12);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(x[i] == doctest::Approx(exact[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("zero right-hand side gives zero") {
    const auto A = random_diagonally_dominant(6, 1);
    std::vector<double> b(6, 0.0), x(6, 3.0);
    const auto r = gmres(A.map(), b, x, LinearSolveConfig{});
    CHECK(r.iterations == 0);
    for (double v : x)
        CHECK(v == 0.0);
}

TEST_CASE("warm start at the solution takes no iterations") {
    const auto A = random_diagonally_dominant(10, 2);
    std::vector<double> b(10, 1.0);
    auto x = oracle::dense_solve(A.a, b);
    LinearSolveConfig cfg;
    cfg.tolerance = 1e-10;
    CHECK(gmres(A.map(), b, x, cfg).iterations == 0);
}

TEST_CASE("an exhausted budget reports iterations and residual") {
    const std::size_t n = 30;
    Dense A{std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
    for (std::size_t i = 0; i < n; ++i) {
        A.a[i][i] = 1.0 + double(i) * double(i);
        if (i + 1 < n)
            A.a[i][i + 1] = 0.5;
    }
    std::vector<double> b(n, 1.0), x(n, 0.0);
    LinearSolveConfig cfg;
    cfg.max_iterations = 2;
    try {
        gmres(A.map(), b, x, cfg);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.iterations() == 2);
        CHECK(e.residual() > 1e-12);
    }
    std::fill(x.begin(), x.end(), 0.0);
    CHECK_THROWS_AS(bicgstab(A.map(), b, x, cfg), SolverError);
}

TEST_CASE("residual floor stops early") {
    const auto A = random_diagonally_dominant(20, 3);
    std::vector<double> b(20, 1.0), x(20, 0.0);
    LinearSolveConfig cfg;
    cfg.residual_floor = 1e30;
    CHECK(gmres(A.map(), b, x, cfg).iterations == 0);
}

}
