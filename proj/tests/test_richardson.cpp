#include "oracles.hpp"
#include "properties.hpp"

#include "spde/richardson.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace spde;

namespace {

Trajectory synthetic(const TorusGrid& grid, const TimeGrid& tg, std::uint64_t fingerprint,
                     const std::function<double(std::size_t, double)>& value) {
    Trajectory t{grid, tg, {}, fingerprint};
    for (std::size_t i = 0; i <= tg.steps(); ++i)
        t.states.push_back(GridFunction::sample(grid, [&](std::span<const double> x) { return value(i, x[0]); }));
    return t;
}

double sup_gap(const Trajectory& a, const Trajectory& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        worst = std::max(worst, sup_grid_norm(a.states[i] - b.states[i]));
    return worst;
}

}  // namespace

TEST_SUITE("richardson") {

TEST_CASE("weights for small k") {
    CHECK(vandermonde_weights(0).beta == std::vector<double>{1.0});
    const auto w1 = vandermonde_weights(1);
    CHECK(w1.order == 1);
    CHECK(w1.beta[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(w1.beta[1] == doctest::Approx(2.0).epsilon(1e-14));
    const auto w2 = vandermonde_weights(2);
    CHECK(w2.beta[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(w2.beta[1] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(w2.beta[2] == doctest::Approx(8.0 / 3).epsilon(1e-14));
    CHECK_THROWS_AS(vandermonde_weights(13), std::out_of_range);
}

TEST_CASE("weights match exact fractions for k <= 6") {
    const auto exact1 = oracle::exact_weights(1);
    CHECK(exact1[0] == oracle::Exact(-1));
    CHECK(exact1[1] == oracle::Exact(2));
    for (unsigned k = 0; k <= 6; ++k) {
        const auto w = vandermonde_weights(k);
        const auto e = oracle::exact_weights(k);
        for (unsigned j = 0; j <= k; ++j) {
            const double ex = static_cast<double>(e[j]);
            CHECK(std::abs(w.beta[j] - ex) <= 1e-12 * std::max(1.0, std::abs(ex)));
        }
    }
}

TEST_CASE("weights match the Lagrange basis at zero for k <= 12") {
    for (unsigned k = 0; k <= max_richardson_order; ++k) {
        const auto w = vandermonde_weights(k);
        const auto l = oracle::lagrange_weights(k);
        for (unsigned j = 0; j <= k; ++j)
            CHECK(std::abs(w.beta[j] - double(l[j])) <= 1e-14 * std::max(1.0L, std::abs(l[j])));
    }
}

TEST_CASE("moment identities") {
    const auto r = property::weight_identities();
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("k = 0 and equal inputs") {
    const TorusGrid grid(1, 1.0, 8);
    const TimeGrid tg(1.0, 2);
    auto v = [](std::size_t i, double x) { return std::cos(6.0 * x) + double(i); };
    const auto coarse = synthetic(grid, tg, 1, v);
    const std::vector<Trajectory> one{coarse};
    CHECK(sup_gap(extrapolate(one, vandermonde_weights(0)), coarse) == 0.0);
    std::vector<Trajectory> same;
    for (unsigned j = 0; j <= 3; ++j)
        same.push_back(synthetic(grid.refined(j), tg, 1, v));
    CHECK(sup_gap(extrapolate(same, vandermonde_weights(3)), coarse) < 1e-12);
}

TEST_CASE("annihilation of synthetic error terms") {
    const auto r = property::extrapolation_annihilation();
    INFO(r.detail);
    CHECK(r.pass);

    // V + sum_q h^q W_q for q = 1..k+1 leaves beta-moment of order k+1 times W_{k+1}
    const TorusGrid grid(1, 1.0, 8);
    const TimeGrid tg(1.0, 2);
    for (unsigned k = 1; k <= 4; ++k) {
        std::vector<Trajectory> levels;
        for (unsigned j = 0; j <= k; ++j) {
            const double h = grid.refined(j).spacing();
            levels.push_back(synthetic(grid.refined(j), tg, 3, [&](std::size_t i, double x) {
                double v = std::sin(2 * std::numbers::pi * x) + double(i);
                for (unsigned q = 1; q <= k + 1; ++q)
                    v += std::pow(h, q) * std::cos(q * x);
                return v;
            }));
        }
        const auto w = vandermonde_weights(k);
        double moment = 0.0;
        for (unsigned j = 0; j <= k; ++j)
            moment += w.beta[j] * std::pow(grid.spacing() * std::ldexp(1.0, -int(j)), k + 1);
        const auto expect = synthetic(grid, tg, 3, [&](std::size_t i, double x) {
            return std::sin(2 * std::numbers::pi * x) + double(i) + moment * std::cos((k + 1) * x);
        });
        CHECK(sup_gap(extrapolate(levels, w), expect) < 1e-11);
    }
}

TEST_CASE("linearity in the inputs") {
    const auto r = property::linearity();
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("mismatched inputs are rejected") {
    const TorusGrid grid(1, 1.0, 8);
    const TimeGrid tg(1.0, 2);
    auto v = [](std::size_t, double x) { return x; };
    const auto a = synthetic(grid, tg, 1, v);
    const auto b = synthetic(grid.refined(1), tg, 1, v);
    const auto w = vandermonde_weights(1);
    CHECK_THROWS(extrapolate(std::vector<Trajectory>{a}, w));
    CHECK_THROWS(extrapolate(std::vector<Trajectory>{a, synthetic(grid.refined(2), tg, 1, v)}, w));
    CHECK_THROWS(extrapolate(std::vector<Trajectory>{a, synthetic(TorusGrid(1, 1.0, 12), tg, 1, v)}, w));
    CHECK_THROWS(extrapolate(std::vector<Trajectory>{a, synthetic(grid.refined(1), TimeGrid(1.0, 3), 1, v)}, w));
    CHECK_THROWS(extrapolate(std::vector<Trajectory>{a, synthetic(grid.refined(1), tg, 2, v)}, w));
    CHECK_NOTHROW(extrapolate(std::vector<Trajectory>{a, b}, w));
}

TEST_CASE("extrapolated differences") {
    const TorusGrid grid(1, 1.0, 10);
    const TimeGrid tg(1.0, 2);
    const Stencil s(1, {{0}, {1}, {2}});
    const auto wave = synthetic(grid, tg, 1, [](std::size_t i, double x) { return std::sin(9.0 * x) * double(i + 1); });
    CHECK(sup_gap(extrapolated_difference(wave, s, {}), wave) == 0.0);
    const auto flat = synthetic(grid, tg, 1, [](std::size_t i, double) { return 2.0 * double(i); });
    for (const auto& st : extrapolated_difference(flat, s, {{1}, {2}}).states)
        CHECK(sup_grid_norm(st) == 0.0);
    const auto linear = synthetic(grid, tg, 1, [](std::size_t i, double x) { return (1.0 + double(i)) * x; });
    const auto d = extrapolated_difference(linear, s, {{2}});
    for (std::size_t i = 0; i <= tg.steps(); ++i)
        for (std::size_t p = 0; p + 2 < grid.point_count(); ++p)
            CHECK(d.states[i][p] == doctest::Approx(2.0 * (1.0 + double(i))).epsilon(1e-12));
    CHECK_THROWS(extrapolated_difference(linear, s, {{3}}));
}

TEST_CASE("estimate_order on exact power laws") {
    const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
    for (int p : {1, 3}) {
        std::vector<double> e;
        for (double x : h)
            e.push_back(7.0 * std::pow(x, p));
        const auto est = estimate_order(h, e);
        CHECK(est.slope == doctest::Approx(double(p)).epsilon(1e-10));
        CHECK(est.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-10));
        REQUIRE(est.pairwise.size() == 3);
        for (double r : est.pairwise)
            CHECK(r == doctest::Approx(double(p)).epsilon(1e-10));
    }
    // unsorted input gives pairwise ratios in decreasing h
    const std::vector<double> hs{0.025, 0.1, 0.05};
    const std::vector<double> es{0.025 * 0.025, 0.01, 0.0025};
    const auto est = estimate_order(hs, es);
    CHECK(est.slope == doctest::Approx(2.0));
    CHECK(est.pairwise.size() == 2);
}

TEST_CASE("estimate_order under 5% jitter") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    const std::vector<double> h{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    for (int trial = 0; trial < 500; ++trial) {
        const double p = 1.0 + trial % 3;
        std::vector<double> e;
        for (double x : h)
            e.push_back(std::pow(x, p) * (1.0 + u(gen)));
        CHECK(std::abs(estimate_order(h, e).slope - p) <= 0.15);
    }
}

TEST_CASE("estimate_order errors") {
    const std::vector<double> h{0.1, 0.05, 0.025};
    CHECK_THROWS_AS(estimate_order(std::vector<double>{0.1, 0.05}, std::vector<double>{1.0, 0.5}), OrderEstimateError);
    CHECK_THROWS_AS(estimate_order(h, std::vector<double>{1.0, 0.0, 0.2}), OrderEstimateError);
    CHECK_THROWS_AS(estimate_order(h, std::vector<double>{1.0, -1.0, 0.2}), OrderEstimateError);
    CHECK_THROWS_AS(estimate_order(std::vector<double>{0.1, 0.1, 0.05}, std::vector<double>{1.0, 0.5, 0.2}), OrderEstimateError);
    CHECK_THROWS_AS(estimate_order(h, std::vector<double>{1.0, 0.5}), OrderEstimateError);
}

}
