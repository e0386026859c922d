#include "spde/config.hpp"

#include "spde/expression.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <sstream>

namespace spde {

std::string to_string(ReportFormat f) { return f == ReportFormat::json ? "json" : "csv"; }

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "csv")
        return ReportFormat::csv;
    if (s == "json")
        return ReportFormat::json;
    throw ConfigError("unknown report format '" + s + "' (expected csv or json)");
}

namespace {

namespace pt = boost::property_tree;

template <class T>
T number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    if (in.fail() || !(in >> std::ws).eof())
        throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
    return out;
}

template <class T>
std::vector<T> number_list(const std::string& key, const std::string& value) {
    std::vector<std::string> parts;
    boost::split(parts, value, boost::is_any_of(","));
    std::vector<T> out;
    for (auto& part : parts) {
        boost::trim(part);
        if (!part.empty())
            out.push_back(number<T>(key, part));
    }
    return out;
}

double constant_expression(const std::string& key, const std::string& text) {
    try {
        const auto e = Expression::parse(text);
        if (e.depends_on_x() || e.depends_on_t())
            throw ConfigError("'" + key + "' must be a constant expression");
        return e(0.0, {});
    } catch (const ExpressionError& err) {
        throw ConfigError("'" + key + "': " + err.what());
    }
}

void check_expression(const std::string& key, const std::string& text, int dimension) {
    try {
        const auto e = Expression::parse(text);
        if (e.max_axis() > dimension)
            throw ConfigError("'" + key + "' uses a coordinate beyond the dimension");
    } catch (const ExpressionError& err) {
        throw ConfigError("'" + key + "': " + err.what());
    }
}

// "aXY" / "bXR" with single digits
std::pair<int, int> index_pair(const std::string& key) {
    if (key.size() != 3 || !std::isdigit(static_cast<unsigned char>(key[1])) ||
        !std::isdigit(static_cast<unsigned char>(key[2])))
        throw ConfigError("malformed coefficient key '" + key + "'");
    return {key[1] - '0', key[2] - '0'};
}

void read_problem(const pt::ptree& section, ProblemSpec& p) {
    // scalar settings first: the coefficient keys are checked against them
    if (auto v = section.get_optional<std::string>("dimension"))
        p.dimension = number<int>("dimension", *v);
    if (auto v = section.get_optional<std::string>("length"))
        p.length = constant_expression("length", *v);
    if (auto v = section.get_optional<std::string>("noise_dim"))
        p.noise_dim = number<std::size_t>("noise_dim", *v);
    if (auto v = section.get_optional<std::string>("kappa"))
        p.kappa = number<double>("kappa", *v);
    if (p.dimension < 1 || p.dimension > 9)
        throw ConfigError("dimension must lie in 1..9");
    if (p.noise_dim < 1 || p.noise_dim > 9)
        throw ConfigError("noise_dim must lie in 1..9");
    if (!(p.length > 0.0))
        throw ConfigError("length must be positive");

    for (const auto& [key, node] : section) {
        const auto value = node.get_value<std::string>();
        if (key == "dimension" || key == "length" || key == "noise_dim" || key == "kappa")
            continue;
        if (key == "f") {
            check_expression(key, value, p.dimension);
            p.f = value;
        } else if (key == "u0") {
            check_expression(key, value, p.dimension);
            p.u0 = value;
        } else if (key.size() == 2 && key[0] == 'g' && std::isdigit(static_cast<unsigned char>(key[1]))) {
            const int rho = key[1] - '0';
            if (rho < 1 || static_cast<std::size_t>(rho) > p.noise_dim)
                throw ConfigError("'" + key + "' refers to a noise index beyond noise_dim");
            check_expression(key, value, p.dimension);
            p.g[rho] = value;
        } else if (key[0] == 'a') {
            auto [alpha, beta] = index_pair(key);
            if (alpha > p.dimension || beta > p.dimension)
                throw ConfigError("'" + key + "' refers to an axis beyond the dimension");
            check_expression(key, value, p.dimension);
            const auto k = std::minmax(alpha, beta);
            if (p.a.count(k))
                throw ConfigError("'" + key + "' duplicates a symmetric entry");
            p.a[k] = value;
        } else if (key[0] == 'b') {
            auto [alpha, rho] = index_pair(key);
            if (alpha > p.dimension || rho < 1 || static_cast<std::size_t>(rho) > p.noise_dim)
                throw ConfigError("'" + key + "' is out of range");
            check_expression(key, value, p.dimension);
            p.b[{alpha, rho}] = value;
        } else {
            throw ConfigError("unknown key '" + key + "' in [problem]");
        }
    }
}

void read_numerics(const pt::ptree& section, NumericsSpec& n) {
    for (const auto& [key, node] : section) {
        const auto value = node.get_value<std::string>();
        if (key == "levels")
            n.levels = number_list<std::size_t>(key, value);
        else if (key == "steps")
            n.steps = number<std::size_t>(key, value);
        else if (key == "horizon")
            n.horizon = constant_expression(key, value);
        else if (key == "k")
            n.k = number<unsigned>(key, value);
        else if (key == "solver")
            try {
                n.solve.method = solver_method_from_string(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        else if (key == "tolerance")
            n.solve.tolerance = number<double>(key, value);
        else if (key == "max_iterations")
            n.solve.max_iterations = number<std::size_t>(key, value);
        else if (key == "restart")
            n.solve.restart = number<std::size_t>(key, value);
        else
            throw ConfigError("unknown key '" + key + "' in [numerics]");
    }
}

void read_statistics(const pt::ptree& section, StatisticsSpec& s) {
    for (const auto& [key, node] : section) {
        const auto value = node.get_value<std::string>();
        if (key == "paths")
            s.paths = number<std::size_t>(key, value);
        else if (key == "seed")
            s.seed = number<std::uint64_t>(key, value);
        else if (key == "threads")
            s.threads = number<std::size_t>(key, value);
        else
            throw ConfigError("unknown key '" + key + "' in [statistics]");
    }
}

void read_output(const pt::ptree& section, OutputSpec& o) {
    for (const auto& [key, node] : section) {
        const auto value = node.get_value<std::string>();
        if (key == "dir")
            o.dir = value;
        else if (key == "format")
            o.format = report_format_from_string(value);
        else
            throw ConfigError("unknown key '" + key + "' in [output]");
    }
}

void read_taylor(const pt::ptree& section, TaylorSpec& t) {
    for (const auto& [key, node] : section) {
        const auto value = node.get_value<std::string>();
        if (key == "mode")
            t.mode = number<int>(key, value);
        else if (key == "lambda")
            t.lambda = number_list<int>(key, value);
        else if (key == "mu")
            t.mu = number_list<int>(key, value);
        else if (key == "orders")
            t.orders = number_list<unsigned>(key, value);
        else
            throw ConfigError("unknown key '" + key + "' in [taylor]");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    const auto& lv = numerics.levels;
    if (lv.empty())
        throw ConfigError("at least one mesh level is required");
    for (std::size_t j = 0; j + 1 < lv.size(); ++j)
        if (lv[j + 1] != 2 * lv[j])
            throw ConfigError("mesh levels must double from one level to the next");
    if (lv.front() == 0)
        throw ConfigError("mesh levels must be positive");
    if (statistics.paths == 0)
        throw ConfigError("paths must be at least 1");
    if (numerics.k > 12)
        throw ConfigError("k must not exceed 12");
    if (numerics.k + 1 > lv.size())
        throw ConfigError("k + 1 must not exceed the number of mesh levels");
    if (numerics.steps == 0)
        throw ConfigError("steps must be positive");
    if (!(numerics.horizon > 0.0) || !(numerics.horizon / static_cast<double>(numerics.steps) < 1.0))
        throw ConfigError("horizon / steps must lie in (0,1)");
    try {
        numerics.solve.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (taylor.lambda.size() != static_cast<std::size_t>(problem.dimension) ||
        taylor.mu.size() != static_cast<std::size_t>(problem.dimension))
        throw ConfigError("taylor offsets must have one component per dimension");
}

TorusGrid ExperimentConfig::grid(std::size_t points_per_axis) const {
    return TorusGrid(problem.dimension, problem.length, points_per_axis);
}

ContinuousCoefficients ExperimentConfig::coefficients() const {
    ContinuousCoefficients c(problem.dimension, problem.noise_dim);
    auto field = [](const std::string& text) { return Field::from_expression(Expression::parse(text)); };
    for (const auto& [key, text] : problem.a)
        c.set_a(key.first, key.second, field(text));
    for (const auto& [key, text] : problem.b)
        c.set_b(key.first, static_cast<std::size_t>(key.second - 1), field(text));
    c.set_f(field(problem.f));
    for (const auto& [rho, text] : problem.g)
        c.set_g(static_cast<std::size_t>(rho - 1), field(text));
    c.set_u0(field(problem.u0));
    return c;
}

ExperimentConfig parse_config(const std::string& text) {
    // inline comments are not understood by the ini reader
    std::istringstream lines(text);
    std::string stripped, line;
    while (std::getline(lines, line)) {
        const auto cut = line.find_first_of(";#");
        stripped += line.substr(0, cut);
        stripped += '\n';
    }
    pt::ptree tree;
    try {
        std::istringstream in(stripped);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.source = text;
    for (const auto& [name, section] : tree) {
        if (name == "problem")
            read_problem(section, cfg.problem);
        else if (name == "numerics")
            read_numerics(section, cfg.numerics);
        else if (name == "statistics")
            read_statistics(section, cfg.statistics);
        else if (name == "output")
            read_output(section, cfg.output);
        else if (name == "taylor")
            read_taylor(section, cfg.taylor);
        else
            throw ConfigError("unknown section [" + name + "]");
    }
    if (cfg.taylor.lambda.size() != static_cast<std::size_t>(cfg.problem.dimension) &&
        !tree.get_child_optional("taylor")) {
        cfg.taylor.lambda.assign(static_cast<std::size_t>(cfg.problem.dimension), 0);
        cfg.taylor.lambda[0] = 1;
        cfg.taylor.mu.assign(static_cast<std::size_t>(cfg.problem.dimension), 0);
        cfg.taylor.mu[0] = 2;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open config " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace spde
