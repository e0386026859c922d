#include "spde/report.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace spde {

const Statistic& ConvergenceReport::statistic(const std::string& name) const {
    for (const auto& s : statistics)
        if (s.name == name)
            return s;
    throw std::out_of_range("report has no statistic '" + name + "'");
}

const FitResult& ConvergenceReport::fit(const std::string& name) const {
    for (const auto& f : fits)
        if (f.statistic == name)
            return f;
    throw std::out_of_range("report has no fit for '" + name + "'");
}

nlohmann::json to_json(const ConvergenceReport& r) {
    nlohmann::json j;
    j["study"] = r.study;
    j["k"] = r.k;
    j["seed"] = r.seed;
    j["paths"] = r.paths;
    j["n_x"] = r.n_x;
    j["h"] = r.h;
    j["statistics"] = nlohmann::json::array();
    for (const auto& s : r.statistics)
        j["statistics"].push_back({{"name", s.name}, {"value", s.value}, {"std_error", s.std_error}});
    j["floored"] = r.floored;
    j["fits"] = nlohmann::json::array();
    for (const auto& f : r.fits)
        j["fits"].push_back({{"statistic", f.statistic},
                             {"fitted", f.fitted},
                             {"slope", f.slope},
                             {"pairwise", f.pairwise},
                             {"levels_used", f.levels_used},
                             {"note", f.note}});
    j["primary_statistic"] = r.primary_statistic;
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["heuristic_reference"] = r.heuristic_reference;
    j["noise_fingerprints"] = r.noise_fingerprints;
    j["notes"] = r.notes;
    j["config"] = r.config_echo;
    return j;
}

ConvergenceReport report_from_json(const nlohmann::json& j) {
    ConvergenceReport r;
    j.at("study").get_to(r.study);
    j.at("k").get_to(r.k);
    j.at("seed").get_to(r.seed);
    j.at("paths").get_to(r.paths);
    j.at("n_x").get_to(r.n_x);
    j.at("h").get_to(r.h);
    for (const auto& s : j.at("statistics"))
        r.statistics.push_back({s.at("name").get<std::string>(), s.at("value").get<std::vector<double>>(),
                                s.at("std_error").get<std::vector<double>>()});
    j.at("floored").get_to(r.floored);
    for (const auto& f : j.at("fits")) {
        FitResult fr;
        f.at("statistic").get_to(fr.statistic);
        f.at("fitted").get_to(fr.fitted);
        f.at("slope").get_to(fr.slope);
        f.at("pairwise").get_to(fr.pairwise);
        f.at("levels_used").get_to(fr.levels_used);
        f.at("note").get_to(fr.note);
        r.fits.push_back(std::move(fr));
    }
    j.at("primary_statistic").get_to(r.primary_statistic);
    j.at("threshold").get_to(r.threshold);
    j.at("pass").get_to(r.pass);
    j.at("heuristic_reference").get_to(r.heuristic_reference);
    j.at("noise_fingerprints").get_to(r.noise_fingerprints);
    j.at("notes").get_to(r.notes);
    j.at("config").get_to(r.config_echo);
    return r;
}

namespace {

// shortest representation that reads back to the same double
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + file.string());
}

}  // namespace

std::string report_csv(const ConvergenceReport& r) {
    std::string out = "level_index,h,n_x,statistic_name,value,std_error\n";
    for (std::size_t l = 0; l < r.n_x.size(); ++l) {
        for (const auto& s : r.statistics) {
            out += std::to_string(l) + ',' + format_double(r.h[l]) + ',' + std::to_string(r.n_x[l]) +
                   ',' + s.name + ',' + format_double(s.value[l]) + ',' + format_double(s.std_error[l]) +
                   '\n';
        }
    }
    return out;
}

std::vector<std::filesystem::path> emit_report(const ConvergenceReport& r, const RunMetadata& meta,
                                               const std::filesystem::path& dir, ReportFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    const std::string stem = r.study.empty() ? "report" : r.study;
    std::vector<std::filesystem::path> written;
    if (format == ReportFormat::csv) {
        written.push_back(dir / (stem + ".csv"));
        write_file(written.back(), report_csv(r));
    } else {
        written.push_back(dir / (stem + ".json"));
        write_file(written.back(), to_json(r).dump(2) + '\n');
    }
    for (const auto& s : r.statistics) {
        std::string text = "# log(h) log(" + s.name + ")\n";
        for (std::size_t l = 0; l < r.n_x.size(); ++l)
            if (s.value[l] > 0.0)
                text += format_double(std::log(r.h[l])) + ' ' + format_double(std::log(s.value[l])) + '\n';
        written.push_back(dir / (stem + '_' + s.name + ".dat"));
        write_file(written.back(), text);
    }
    nlohmann::json m;
    m["runtime_seconds"] = meta.runtime_seconds;
    m["threads"] = meta.threads;
    m["started"] = meta.started;
    m["sup_norm_domain"] = "the supremum over G_h is a maximum over the points of the periodic grid";
    written.push_back(dir / (stem + "_metadata.json"));
    write_file(written.back(), m.dump(2) + '\n');
    return written;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace spde
