// Acceptance suite: one PASS/FAIL line per criterion.

#include "oracles.hpp"
#include "properties.hpp"

#include "spde/config.hpp"
#include "spde/harness.hpp"
#include "spde/richardson.hpp"
#include "spde/scheme.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <numbers>
#include <sstream>
#include <string>

using namespace spde;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const char* base_config = R"(
[problem]
dimension = 1
length = 1
noise_dim = 1
a11 = 1
b11 = 0.8
f = 0
g1 = 0
u0 = sin(2*pi*x)

[numerics]
levels = 32,64,128,256
steps = 64
horizon = 1
solver = gmres
tolerance = 1e-12

[statistics]
paths = 64
seed = 20240101
threads = 0
)";

ExperimentConfig config_with_k(unsigned k) {
    auto cfg = parse_config(base_config);
    cfg.numerics.k = k;
    return cfg;
}

std::string join(const std::vector<double>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s << (i ? ", " : "") << v[i];
    return s.str();
}

std::string describe_fit(const ConvergenceReport& rep, const std::string& stat) {
    const auto& fit = rep.fit(stat);
    std::ostringstream s;
    s << stat << " order " << fit.slope << " (pairwise " << join(fit.pairwise) << "; values "
      << join(rep.statistic(stat).value) << ")";
    std::size_t floored = 0;
    for (bool f : rep.floored)
        floored += f;
    if (floored)
        s << "; " << floored << " floored level(s) excluded";
    if (!fit.note.empty())
        s << "; " << fit.note;
    return s.str();
}

Outcome weights() {
    double worst = 0.0;
    for (unsigned k = 0; k <= max_richardson_order; ++k) {
        const auto m = weight_moments(vandermonde_weights(k));
        worst = std::max(worst, std::abs(m[0] - 1.0));
        for (std::size_t i = 1; i < m.size(); ++i)
            worst = std::max(worst, std::abs(m[i]));
    }
    double oracle_gap = 0.0;
    for (unsigned k = 0; k <= 6; ++k) {
        const auto w = vandermonde_weights(k);
        const auto exact = oracle::exact_weights(k);
        for (unsigned j = 0; j <= k; ++j) {
            const double e = static_cast<double>(exact[j]);
            oracle_gap = std::max(oracle_gap, std::abs(w.beta[j] - e) / std::max(1.0, std::abs(e)));
        }
    }
    std::ostringstream s;
    s << "moment error " << worst << ", gap to exact fractions " << oracle_gap;
    return {worst <= 1e-12 && oracle_gap <= 1e-12, s.str()};
}

Outcome oracle_equivalence() {
    const TimeGrid tg(1.0, 8);
    ContinuousCoefficients c(1, 1);
    c.set_a(1, 1, Field::constant(1.0));
    c.set_b(1, 0, Field::constant(1.0));
    c.set_u0(Field::function(
        [](double, std::span<const double> x) { return std::sin(2.0 * std::numbers::pi * x[0]); }, false, true));
    double worst = 0.0;
    for (std::size_t n : {16u, 32u}) {
        const auto problem = make_scheme_problem(c, Stencil::coordinate(1), TorusGrid(1, 1.0, n), tg);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto noise = sample_increments(tg, 1, seed);
            const auto a = solve_trajectory(problem, noise, LinearSolveConfig{});
            const auto b = solve_discrete_spectral(problem, noise);
            for (std::size_t i = 0; i < a.states.size(); ++i)
                worst = std::max(worst, sup_grid_norm(a.states[i] - b.states[i]));
        }
    }
    std::ostringstream s;
    s << "sup discrepancy " << worst << " over 20 seeds, n_x 16 and 32";
    return {worst <= 1e-9, s.str()};
}

Outcome slope_window(const ConvergenceReport& rep, const std::string& stat, double lo, double hi) {
    const auto& fit = rep.fit(stat);
    return {fit.fitted && fit.slope >= lo && fit.slope <= hi, describe_fit(rep, stat)};
}

Outcome taylor() {
    auto cfg = parse_config("[problem]\ndimension = 1\n[taylor]\nmode = 1\nlambda = 1\nmu = 2\norders = 0,1,2\n");
    const auto rep = run_taylor_check(cfg);
    std::ostringstream s;
    for (unsigned p = 0; p <= 2; ++p) {
        const auto& r = rep.statistic("single_p" + std::to_string(p)).value;
        const auto& b = rep.statistic("single_bound_p" + std::to_string(p)).value;
        double worst = 0.0;
        for (std::size_t l = 0; l < r.size(); ++l)
            worst = std::max(worst, r[l] / b[l]);
        s << "p=" << p << ": single/bound <= " << worst << ", double pairwise "
          << join(rep.fit("double_p" + std::to_string(p)).pairwise) << "; ";
    }
    return {rep.pass, s.str()};
}

Outcome properties() {
    const auto results = property::run_all();
    bool ok = true;
    std::ostringstream s;
    for (const auto& r : results) {
        ok = ok && r.pass;
        if (!r.pass)
            s << "failed: " << r.name << " (" << r.detail << "); ";
    }
    s << results.size() << " properties checked";
    return {ok, s.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string title;
        double limit_seconds;  // 0 = no hard limit
        std::function<Outcome()> run;
    };

    std::optional<ConvergenceReport> k1;
    auto accelerate_k1 = [&]() -> const ConvergenceReport& {
        if (!k1)
            k1 = run_acceleration_study(config_with_k(1));
        return *k1;
    };

    const std::vector<Criterion> criteria{
        {1, "extrapolation weight identities", 1.0, weights},
        {2, "physical and spectral discrete solvers agree", 10.0, oracle_equivalence},
        {3, "base scheme order in [0.7, 1.3]", 0.0,
         [] { return slope_window(run_acceleration_study(config_with_k(0)), "sup", 0.7, 1.3); }},
        {4, "k = 1 extrapolation order in [1.7, 2.4]", 0.0,
         [&] { return slope_window(accelerate_k1(), "sup", 1.7, 2.4); }},
        {5, "k = 2 extrapolation order >= 2.6", 0.0,
         [] { return slope_window(run_acceleration_study(config_with_k(2)), "sup", 2.6, INFINITY); }},
        {6, "k = 1 expansion remainder order >= 1.7", 0.0,
         [] { return slope_window(run_expansion_study(config_with_k(1)), "sup", 1.7, INFINITY); }},
        {7, "Taylor remainder bounds", 5.0, taylor},
        {8, "property suite", 30.0, properties},
        {9, "k = 1 extrapolated difference order in [1.6, 2.4]", 0.0,
         [&] {
             auto out = slope_window(accelerate_k1(), "diff_sup", 1.6, 2.4);
             out.detail += "; shares the paths of criterion 4";
             return out;
         }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = out.pass;
        std::string timing = std::to_string(seconds) + " s";
        if (c.limit_seconds > 0.0 && seconds >= c.limit_seconds) {
            pass = false;
            timing += " exceeds the " + std::to_string(c.limit_seconds) + " s limit";
        }
        failures += !pass;
        std::printf("%s criterion %d: %s -- %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    out.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
