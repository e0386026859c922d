// Command-line driver for the validation, acceleration, expansion and Taylor studies.
//
// Exit status: 0 PASS, 2 FAIL, 1 error.

#include "spde/config.hpp"
#include "spde/harness.hpp"
#include "spde/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "base seed (overrides [statistics] seed)");
    cmd->add_option("--paths", o.paths, "Monte Carlo paths (overrides [statistics] paths)");
    cmd->add_option("--out", o.out, "output directory (overrides [output] dir)");
    cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", o.threads, "worker threads, 0 for all cores");
}

spde::ExperimentConfig load(const CommonOptions& o) {
    auto cfg = spde::load_config(o.config);
    if (o.seed)
        cfg.statistics.seed = *o.seed;
    if (o.paths)
        cfg.statistics.paths = *o.paths;
    if (o.out)
        cfg.output.dir = *o.out;
    if (o.format)
        cfg.output.format = spde::report_format_from_string(*o.format);
    if (o.threads)
        cfg.statistics.threads = *o.threads;
    cfg.validate();
    return cfg;
}

void print_summary(const spde::ConvergenceReport& rep) {
    std::printf("%-8s %-12s", "n_x", "h");
    for (const auto& s : rep.statistics)
        std::printf(" %-16s", s.name.c_str());
    std::printf("\n");
    for (std::size_t l = 0; l < rep.n_x.size(); ++l) {
        std::printf("%-8zu %-12.6g", rep.n_x[l], rep.h[l]);
        for (const auto& s : rep.statistics)
            std::printf(" %-16.6e", s.value[l]);
        std::printf("%s\n", rep.floored.size() > l && rep.floored[l] ? "  (floored)" : "");
    }
    for (const auto& f : rep.fits) {
        if (f.fitted)
            std::printf("order[%s] = %.4f\n", f.statistic.c_str(), f.slope);
        else
            std::printf("order[%s] not fitted: %s\n", f.statistic.c_str(), f.note.c_str());
    }
    for (const auto& n : rep.notes)
        std::printf("note: %s\n", n.c_str());
    if (rep.threshold > 0.0)
        std::printf("%s: order[%s] >= %.2f required\n", rep.pass ? "PASS" : "FAIL",
                    rep.primary_statistic.c_str(), rep.threshold);
    else
        std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
}

template <class Study>
int run_study(const CommonOptions& o, Study&& study) {
    const auto cfg = load(o);
    spde::RunMetadata meta;
    meta.started = spde::utc_timestamp();
    meta.threads = spde::resolve_threads(cfg.statistics.threads);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = study(cfg);
    meta.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_summary(rep);
    for (const auto& file : spde::emit_report(rep, meta, cfg.output.dir, cfg.output.format))
        std::printf("wrote %s\n", file.string().c_str());
    return rep.pass ? 0 : 2;
}

int run_validate(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto rep = spde::run_validation(cfg);
    std::printf("continuous parabolicity: margin %.6g over %zu samples (kappa %.3g)\n",
                rep.continuous.worst_margin, rep.continuous.samples_checked, rep.kappa);
    for (std::size_t l = 0; l < rep.n_x.size(); ++l)
        std::printf("n_x %-6zu discrete margin %-12.6g consistency residual %.3g\n", rep.n_x[l],
                    rep.discrete[l].worst_margin, rep.consistency[l]);
    for (const auto& m : rep.messages)
        std::printf("note: %s\n", m.c_str());
    std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
    return rep.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicit finite-difference schemes for linear parabolic SPDEs on the torus, "
                 "Richardson acceleration and convergence studies"};
    app.require_subcommand(1);

    CommonOptions validate, accelerate, expansion, taylor;
    add_common(app.add_subcommand("validate", "parabolicity and consistency checks"), validate);
    add_common(app.add_subcommand("accelerate", "Richardson acceleration study"), accelerate);
    add_common(app.add_subcommand("expansion", "expansion remainder study"), expansion);
    add_common(app.add_subcommand("taylor-check", "Taylor remainder checks for differences"), taylor);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto* cmd = app.get_subcommands().front();
        const std::string name = cmd->get_name();
        if (name == "validate")
            return run_validate(validate);
        if (name == "accelerate")
            return run_study(accelerate, spde::run_acceleration_study);
        if (name == "expansion")
            return run_study(expansion, spde::run_expansion_study);
        return run_study(taylor, spde::run_taylor_check);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
