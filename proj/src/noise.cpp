#include "spde/noise.hpp"

#include "binary_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

namespace spde {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("time horizon must be positive");
    if (steps > 0 && !(tau() < 1.0))
        throw std::invalid_argument("time step must lie in (0,1)");
}

NoisePath::NoisePath(std::size_t noise_dim, std::size_t steps, std::vector<double> increments,
                     std::optional<std::uint64_t> seed)
    : noise_dim_(noise_dim), steps_(steps), increments_(std::move(increments)), seed_(seed) {
    if (noise_dim_ == 0)
        throw std::invalid_argument("noise dimension must be at least 1");
    if (increments_.size() != noise_dim_ * steps_)
        throw std::invalid_argument("increment table does not match (d1, n)");
}

std::vector<double> NoisePath::step_increments(std::size_t i) const {
    std::vector<double> xi(noise_dim_);
    for (std::size_t rho = 0; rho < noise_dim_; ++rho)
        xi[rho] = increment(rho, i);
    return xi;
}

std::uint64_t NoisePath::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < bytes; ++k) {
            h ^= p[k];
            h *= 1099511628211ull;
        }
    };
    const std::uint64_t dims[2] = {noise_dim_, steps_};
    mix(dims, sizeof dims);
    mix(increments_.data(), increments_.size() * sizeof(double));
    return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t key_hash(std::uint64_t seed, std::uint64_t rho, std::uint64_t i, std::uint64_t lane) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ rho);
    h = splitmix64(h ^ i);
    return splitmix64(h ^ lane);
}

// uniform in the open interval (0,1)
double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double keyed_standard_normal(std::uint64_t seed, std::uint64_t rho, std::uint64_t i) {
    const double u1 = to_unit(key_hash(seed, rho, i, 0));
    const double u2 = to_unit(key_hash(seed, rho, i, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path) {
    return splitmix64(base_seed ^ splitmix64(path + 0x5eedull));
}

NoisePath sample_increments(const TimeGrid& tg, std::size_t noise_dim, std::uint64_t seed) {
    if (noise_dim == 0)
        throw std::invalid_argument("noise dimension must be at least 1");
    const std::size_t n = tg.steps();
    const double scale = std::sqrt(tg.tau());
    std::vector<double> table(noise_dim * n);
    for (std::size_t rho = 0; rho < noise_dim; ++rho)
        for (std::size_t i = 1; i <= n; ++i)
            table[rho * n + (i - 1)] = scale * keyed_standard_normal(seed, rho, i);
    return NoisePath(noise_dim, n, std::move(table), seed);
}

NoisePath zero_noise(const TimeGrid& tg, std::size_t noise_dim) {
    return NoisePath(noise_dim, tg.steps(), std::vector<double>(noise_dim * tg.steps(), 0.0));
}

void write_noise_path(const NoisePath& path, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out.write("SPDEPATH", 8);
    io::write_u32(out, static_cast<std::uint32_t>(path.noise_dim()));
    io::write_u32(out, static_cast<std::uint32_t>(path.steps()));
    for (double v : path.table())
        io::write_f64(out, v);
    if (!out)
        throw std::runtime_error("failed writing " + file.string());
}

NoisePath read_noise_path(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "SPDEPATH", 8) != 0)
        throw std::runtime_error(file.string() + " is not a noise path file");
    const std::uint32_t d1 = io::read_u32(in);
    const std::uint32_t n = io::read_u32(in);
    std::vector<double> table(static_cast<std::size_t>(d1) * n);
    for (auto& v : table)
        v = io::read_f64(in);
    if (!in)
        throw std::runtime_error(file.string() + " is truncated");
    return NoisePath(d1, n, std::move(table));
}

}  // namespace spde
