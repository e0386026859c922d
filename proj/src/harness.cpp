#include "spde/harness.hpp"

#include "spde/expansion.hpp"
#include "spde/richardson.hpp"
#include "spde/scheme.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace spde {

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0)
        return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task) {
    const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_index = count;
    std::exception_ptr failure;

    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);
}

MeanEstimate mean_estimate(const std::vector<double>& samples) {
    MeanEstimate est;
    if (samples.empty())
        return est;
    const double m = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double s : samples)
        sum += s;
    est.mean = sum / m;
    if (samples.size() > 1) {
        // shifted by the first sample so identical samples give exactly zero
        double d1 = 0.0, d2 = 0.0;
        for (double s : samples) {
            const double d = s - samples.front();
            d1 += d;
            d2 += d * d;
        }
        const double var = std::max(0.0, (d2 - d1 * d1 / m) / (m - 1.0));
        est.std_error = std::sqrt(var / m);
    }
    return est;
}

// ---------------------------------------------------------------------------

ValidationReport run_validation(const ExperimentConfig& cfg) {
    ValidationReport rep;
    rep.kappa = cfg.problem.kappa;
    rep.n_x = cfg.numerics.levels;
    const auto c = cfg.coefficients();
    const auto tg = cfg.time_grid();
    const auto stencil = cfg.stencil();

    const auto coarse = cfg.grid(cfg.numerics.levels.front());
    const auto samples = default_continuous_samples(c, coarse, tg);
    rep.continuous = check_parabolicity_continuous(c, samples, rep.kappa);
    rep.pass = rep.continuous.pass;
    if (!rep.continuous.pass) {
        std::ostringstream msg;
        msg << "continuous parabolicity margin " << rep.continuous.worst_margin << " below kappa "
            << rep.kappa;
        rep.messages.push_back(msg.str());
    }

    for (auto n : cfg.numerics.levels) {
        const auto grid = cfg.grid(n);
        try {
            const auto dc = build_discrete_from_continuous(c, stencil, grid, tg);
            rep.discrete.push_back(check_parabolicity_discrete(dc, default_discrete_samples(dc), rep.kappa));
            rep.consistency.push_back(max_consistency_residual(dc, c, tg));
        } catch (const UnsupportedCoefficients& e) {
            rep.discrete.push_back({});
            rep.consistency.push_back(std::numeric_limits<double>::infinity());
            rep.messages.push_back(std::string("n_x = ") + std::to_string(n) + ": " + e.what());
            rep.pass = false;
            continue;
        }
        if (!rep.discrete.back().pass) {
            std::ostringstream msg;
            msg << "n_x = " << n << ": discrete parabolicity margin " << rep.discrete.back().worst_margin
                << " below kappa " << rep.kappa;
            rep.messages.push_back(msg.str());
            rep.pass = false;
        }
        if (!(rep.consistency.back() <= 1e-12)) {
            std::ostringstream msg;
            msg << "n_x = " << n << ": consistency residual " << rep.consistency.back();
            rep.messages.push_back(msg.str());
            rep.pass = false;
        }
    }
    return rep;
}

namespace {

void require_valid(const ExperimentConfig& cfg) {
    const auto rep = run_validation(cfg);
    if (rep.pass)
        return;
    std::string what = "validation failed";
    for (const auto& m : rep.messages)
        what += "; " + m;
    throw HarnessError(what);
}

double max_sup_sq(const Trajectory& e) {
    double m = 0.0;
    for (const auto& s : e.states)
        m = std::max(m, sup_grid_norm(s));
    return m * m;
}

double max_l2_sq(const Trajectory& e) {
    double m = 0.0;
    for (const auto& s : e.states)
        m = std::max(m, l2_grid_norm(s));
    return m * m;
}

Trajectory subtract(const Trajectory& a, const Trajectory& b) {
    Trajectory out{a.grid, a.time_grid, {}, a.noise_fingerprint};
    for (std::size_t i = 0; i < a.states.size(); ++i)
        out.states.push_back(a.states[i] - b.states[i]);
    return out;
}

Trajectory restrict_trajectory(const Trajectory& t, unsigned j) {
    Trajectory out{t.grid, t.time_grid, {}, t.noise_fingerprint};
    for (const auto& s : t.states)
        out.states.push_back(restrict_to_coarser(s, j));
    if (!out.states.empty())
        out.grid = out.states.front().grid();
    return out;
}

unsigned log2_ratio(std::size_t fine, std::size_t coarse) {
    unsigned j = 0;
    while ((coarse << j) < fine)
        ++j;
    return j;
}

void check_fingerprint(const Trajectory& t, const NoisePath& noise) {
    if (t.noise_fingerprint != noise.fingerprint())
        throw HarnessError("a mesh level was not driven by the shared noise path");
}

// Per-level, per-path samples of each named statistic.
struct Samples {
    std::vector<std::string> names;
    // [statistic][level][path]
    std::vector<std::vector<std::vector<double>>> data;

    Samples(std::vector<std::string> n, std::size_t levels, std::size_t paths)
        : names(std::move(n)),
          data(names.size(), std::vector<std::vector<double>>(levels, std::vector<double>(paths, 0.0))) {}
};

// squared-norm samples become a mean and its square root
void add_statistics(ConvergenceReport& rep, const Samples& s) {
    const std::size_t levels = rep.n_x.size();
    for (std::size_t q = 0; q < s.names.size(); ++q) {
        Statistic sq{s.names[q] + "_sq", {}, {}};
        Statistic root{s.names[q], {}, {}};
        for (std::size_t l = 0; l < levels; ++l) {
            const auto est = mean_estimate(s.data[q][l]);
            sq.value.push_back(est.mean);
            sq.std_error.push_back(est.std_error);
            const double r = std::sqrt(est.mean);
            root.value.push_back(r);
            root.std_error.push_back(r > 0.0 ? est.std_error / (2.0 * r) : 0.0);
        }
        rep.statistics.push_back(std::move(sq));
        rep.statistics.push_back(std::move(root));
    }
}

FitResult fit_statistic(const ConvergenceReport& rep, const std::string& name,
                        const std::vector<bool>& excluded) {
    FitResult fit;
    fit.statistic = name;
    const auto& st = rep.statistic(name);
    std::vector<double> h, e;
    for (std::size_t l = 0; l < rep.n_x.size(); ++l) {
        if (excluded[l] || !(st.value[l] > 0.0))
            continue;
        fit.levels_used.push_back(l);
        h.push_back(rep.h[l]);
        e.push_back(st.value[l]);
    }
    try {
        const auto est = estimate_order(h, e);
        fit.fitted = true;
        fit.slope = est.slope;
        fit.pairwise = est.pairwise;
    } catch (const OrderEstimateError& err) {
        fit.note = err.what();
    }
    return fit;
}

ConvergenceReport report_skeleton(const ExperimentConfig& cfg, const std::string& study) {
    ConvergenceReport rep;
    rep.study = study;
    rep.k = cfg.numerics.k;
    rep.seed = cfg.statistics.seed;
    rep.paths = cfg.statistics.paths;
    rep.n_x = cfg.numerics.levels;
    for (auto n : rep.n_x)
        rep.h.push_back(cfg.problem.length / static_cast<double>(n));
    rep.config_echo = cfg.source;
    rep.noise_fingerprints.assign(cfg.statistics.paths, 0);
    return rep;
}

// marks levels whose primary error lies under 10x the linear-solve tolerance
void apply_floor(ConvergenceReport& rep, const ExperimentConfig& cfg) {
    const double floor = 10.0 * cfg.numerics.solve.tolerance;
    const auto& st = rep.statistic(rep.primary_statistic);
    rep.floored.assign(rep.n_x.size(), false);
    for (std::size_t l = 0; l < rep.n_x.size(); ++l) {
        if (st.value[l] < floor) {
            rep.floored[l] = true;
            rep.notes.push_back("level " + std::to_string(l) + " (n_x = " + std::to_string(rep.n_x[l]) +
                                ") is below the solver floor and is excluded from the fit");
        }
    }
}

void decide(ConvergenceReport& rep, const std::vector<bool>& excluded,
            const std::vector<std::string>& fitted_names) {
    for (const auto& name : fitted_names)
        rep.fits.push_back(fit_statistic(rep, name, excluded));
    const auto& primary = rep.fit(rep.primary_statistic);
    rep.threshold = static_cast<double>(rep.k) + 1.0 - 0.3;
    rep.pass = primary.fitted && primary.slope >= rep.threshold;
    if (!primary.fitted)
        rep.notes.push_back("no order fitted for " + rep.primary_statistic + ": " + primary.note);
}

std::map<std::size_t, SchemeProblem> build_problems(const ExperimentConfig& cfg,
                                                    const ContinuousCoefficients& c,
                                                    const std::vector<std::size_t>& counts) {
    std::map<std::size_t, SchemeProblem> problems;
    const auto tg = cfg.time_grid();
    const auto stencil = cfg.stencil();
    for (auto n : counts)
        if (!problems.count(n))
            problems.emplace(n, make_scheme_problem(c, stencil, cfg.grid(n), tg));
    return problems;
}

}  // namespace

ConvergenceReport run_acceleration_study(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.numerics.k > max_richardson_order)
        throw HarnessError("k exceeds the supported extrapolation order");
    require_valid(cfg);

    const auto c = cfg.coefficients();
    const auto tg = cfg.time_grid();
    const auto stencil = cfg.stencil();
    const unsigned k = cfg.numerics.k;
    const auto& levels = cfg.numerics.levels;
    const std::size_t L = levels.size();
    const std::size_t M = cfg.statistics.paths;
    const auto weights = vandermonde_weights(k);
    const bool exact_reference = c.constant_in_x();

    std::vector<std::size_t> counts;
    for (auto n : levels)
        for (unsigned j = 0; j <= k; ++j)
            counts.push_back(n << j);
    const auto problems = build_problems(cfg, c, counts);

    ConvergenceReport rep = report_skeleton(cfg, "accelerate");
    rep.primary_statistic = "sup";
    rep.heuristic_reference = !exact_reference;
    if (!exact_reference)
        rep.notes.push_back("coefficients vary in x: the reference is the extrapolant at the finest "
                            "level (heuristic self-convergence); the finest level is not fitted");

    Offset e1(static_cast<std::size_t>(cfg.problem.dimension), 0);
    e1[0] = 1;

    Samples samples({"sup", "l2", "diff_sup"}, L, M);
    parallel_for(M, cfg.statistics.threads, [&](std::size_t m) {
        const auto noise = sample_increments(tg, c.noise_dim(), path_seed(cfg.statistics.seed, m));
        std::map<std::size_t, Trajectory> solved;
        for (const auto& [n, problem] : problems) {
            auto t = solve_trajectory(problem, noise, cfg.numerics.solve);
            check_fingerprint(t, noise);
            solved.emplace(n, std::move(t));
        }
        std::vector<Trajectory> vbar;
        for (std::size_t l = 0; l < L; ++l) {
            std::vector<Trajectory> family;
            for (unsigned j = 0; j <= k; ++j)
                family.push_back(solved.at(levels[l] << j));
            vbar.push_back(extrapolate(family, weights));
        }
        for (std::size_t l = 0; l < L; ++l) {
            const Trajectory ref =
                exact_reference ? solve_time_scheme_spectral(c, cfg.grid(levels[l]), tg, noise)
                                : restrict_trajectory(vbar.back(), log2_ratio(levels.back(), levels[l]));
            const auto err = subtract(vbar[l], ref);
            samples.data[0][l][m] = max_sup_sq(err);
            samples.data[1][l][m] = max_l2_sq(err);
            double d = 0.0;
            for (const auto& s : err.states)
                d = std::max(d, sup_grid_norm(diff(s, stencil, e1, s.grid().spacing())));
            samples.data[2][l][m] = d * d;
        }
        rep.noise_fingerprints[m] = noise.fingerprint();
    });

    add_statistics(rep, samples);
    apply_floor(rep, cfg);
    auto excluded = rep.floored;
    if (!exact_reference)
        excluded.back() = true;
    decide(rep, excluded, {"sup", "l2", "diff_sup"});
    return rep;
}

ConvergenceReport run_expansion_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const unsigned k = cfg.numerics.k;
    if (k > default_max_correction_order)
        throw HarnessError("the expansion study supports k <= 2");
    require_valid(cfg);
    const auto c = cfg.coefficients();
    if (!c.constant_in_x())
        throw HarnessError("the expansion study needs coefficients constant in x");

    const auto tg = cfg.time_grid();
    const auto& levels = cfg.numerics.levels;
    const std::size_t L = levels.size();
    const std::size_t M = cfg.statistics.paths;
    const auto problems = build_problems(cfg, c, levels);
    const std::size_t finest = levels.back();
    const auto& fine_problem = problems.at(finest);

    ConvergenceReport rep = report_skeleton(cfg, "expansion");
    rep.primary_statistic = "sup";

    Samples samples({"sup", "l2"}, L, M);
    parallel_for(M, cfg.statistics.threads, [&](std::size_t m) {
        const auto noise = sample_increments(tg, c.noise_dim(), path_seed(cfg.statistics.seed, m));
        const auto nu0 = solve_time_scheme_spectral(c, fine_problem.grid(), tg, noise);
        const auto corr = solve_correction_system(k, c, fine_problem.coefficients, tg, noise, nu0);
        for (std::size_t l = 0; l < L; ++l) {
            const auto vh = solve_trajectory(problems.at(levels[l]), noise, cfg.numerics.solve);
            check_fingerprint(vh, noise);
            const auto r = remainder(vh, nu0, corr, k);
            samples.data[0][l][m] = max_sup_sq(r);
            samples.data[1][l][m] = max_l2_sq(r);
        }
        rep.noise_fingerprints[m] = noise.fingerprint();
    });

    add_statistics(rep, samples);
    apply_floor(rep, cfg);
    decide(rep, rep.floored, {"sup", "l2"});
    return rep;
}

ConvergenceReport run_taylor_check(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto& t = cfg.taylor;
    ConvergenceReport rep = report_skeleton(cfg, "taylor");
    rep.paths = 0;
    rep.noise_fingerprints.clear();
    rep.floored.assign(rep.n_x.size(), false);
    rep.pass = true;

    const double L = cfg.problem.length;
    const double wave = 2.0 * std::acos(-1.0) * t.mode / L;
    for (unsigned p : t.orders) {
        Statistic single{"single_p" + std::to_string(p), {}, {}};
        Statistic bound{"single_bound_p" + std::to_string(p), {}, {}};
        Statistic dbl{"double_p" + std::to_string(p), {}, {}};
        for (auto n : cfg.numerics.levels) {
            const auto phi = GridFunction::sample(cfg.grid(n), [&](std::span<const double> x) {
                return std::sin(wave * x[0]);
            });
            const auto s = taylor_single_difference(phi, t.lambda, p);
            const auto d = taylor_double_difference(phi, t.lambda, t.mu, p);
            single.value.push_back(s.remainder);
            bound.value.push_back(s.bound);
            dbl.value.push_back(d.remainder);
            if (!(s.remainder <= s.bound * (1.0 + 1e-6))) {
                rep.pass = false;
                rep.notes.push_back("single-difference remainder exceeds its bound at n_x = " +
                                    std::to_string(n) + ", p = " + std::to_string(p));
            }
        }
        for (auto* st : {&single, &bound, &dbl})
            st->std_error.assign(st->value.size(), 0.0);
        rep.statistics.push_back(std::move(single));
        rep.statistics.push_back(std::move(bound));
        rep.statistics.push_back(std::move(dbl));

        const std::vector<bool> none(rep.n_x.size(), false);
        rep.fits.push_back(fit_statistic(rep, "single_p" + std::to_string(p), none));
        auto fit = fit_statistic(rep, "double_p" + std::to_string(p), none);
        if (!fit.fitted) {
            rep.pass = false;
            rep.notes.push_back("double_p" + std::to_string(p) + ": " + fit.note);
        }
        for (double rate : fit.pairwise) {
            if (rate < p + 0.8 || rate > p + 1.2) {
                rep.pass = false;
                rep.notes.push_back("double_p" + std::to_string(p) + ": dyadic rate " +
                                    std::to_string(rate) + " outside [p+0.8, p+1.2]");
            }
        }
        rep.fits.push_back(std::move(fit));
    }
    rep.notes.push_back("single: remainder <= |h|^{p+1}/(p+2)! ||d^{p+2} phi|| (1 + 1e-6); "
                        "double: successive dyadic rates in [p+0.8, p+1.2]");
    return rep;
}

}  // namespace spde
