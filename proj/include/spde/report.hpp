#pragma once

// Convergence reports and their CSV / JSON / plot-data emission.

#include "spde/config.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spde {

struct Statistic {
    std::string name;
    std::vector<double> value;      ///< per level
    std::vector<double> std_error;  ///< per level, Monte Carlo standard error
};

struct FitResult {
    std::string statistic;
    bool fitted = false;
    double slope = 0.0;
    std::vector<double> pairwise;
    std::vector<std::size_t> levels_used;
    std::string note;
};

struct ConvergenceReport {
    std::string study;
    unsigned k = 0;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::vector<std::size_t> n_x;
    std::vector<double> h;
    std::vector<Statistic> statistics;
    /// Levels whose primary error fell below the linear-solve floor.
    std::vector<bool> floored;
    std::vector<FitResult> fits;
    std::string primary_statistic;
    double threshold = 0.0;
    bool pass = false;
    /// True when the reference is the finest extrapolant rather than an exact solution.
    bool heuristic_reference = false;
    /// Fingerprint of the noise path shared by all mesh levels, per path.
    std::vector<std::uint64_t> noise_fingerprints;
    std::vector<std::string> notes;
    std::string config_echo;

    const Statistic& statistic(const std::string& name) const;
    const FitResult& fit(const std::string& name) const;
};

/// Run-dependent data kept out of the report so reports stay byte-identical.
struct RunMetadata {
    double runtime_seconds = 0.0;
    std::size_t threads = 1;
    std::string started;  ///< ISO 8601 UTC
};

nlohmann::json to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const nlohmann::json& j);

/// Header "level_index,h,n_x,statistic_name,value,std_error" and one row per
/// (level, statistic).
std::string report_csv(const ConvergenceReport& report);

/// Writes <study>.csv or <study>.json, a plot file <study>_<statistic>.dat with
/// (log h, log value) columns per statistic, and <study>_metadata.json.
/// Returns the paths written; throws std::runtime_error when `dir` is unwritable.
std::vector<std::filesystem::path> emit_report(const ConvergenceReport& report,
                                               const RunMetadata& meta,
                                               const std::filesystem::path& dir,
                                               ReportFormat format);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace spde
