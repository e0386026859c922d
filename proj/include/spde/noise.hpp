#pragma once

// Time grids and seeded Wiener increments.
//
// Increments come from a counter-based generator keyed by (seed, rho, i):
// each standard normal is produced by the Box-Muller cosine branch from two
// uniforms obtained by hashing the key with the SplitMix64 finaliser.  The
// value of xi^rho_i therefore does not depend on generation order, and the
// transform is fixed so regression data stays bit-reproducible.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace spde {

/// {t_i = i*tau : i = 0..n}, tau = T/n.
class TimeGrid {
public:
    /// n = 0 is the degenerate grid {0} with no steps (tau reported as 0).
    /// Throws std::invalid_argument unless T > 0 and tau < 1.
    TimeGrid(double horizon, std::size_t steps);

    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    double tau() const noexcept { return steps_ == 0 ? 0.0 : horizon_ / static_cast<double>(steps_); }
    double time(std::size_t i) const noexcept { return static_cast<double>(i) * tau(); }

    bool operator==(const TimeGrid& other) const {
        return steps_ == other.steps_ && horizon_ == other.horizon_;
    }

private:
    double horizon_;
    std::size_t steps_;
};

class NoisePath {
public:
    /// Row-major [rho][i] table of increments; rho in 0..d1-1, i in 1..n
    /// stored at column i-1.
    NoisePath(std::size_t noise_dim, std::size_t steps, std::vector<double> increments,
              std::optional<std::uint64_t> seed = std::nullopt);

    std::size_t noise_dim() const noexcept { return noise_dim_; }
    std::size_t steps() const noexcept { return steps_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }

    /// xi^rho_i for rho in 0..d1-1 and i in 1..n.
    double increment(std::size_t rho, std::size_t i) const {
        return increments_[rho * steps_ + (i - 1)];
    }
    /// The d1 increments of step i.
    std::vector<double> step_increments(std::size_t i) const;

    std::span<const double> table() const noexcept { return increments_; }

    /// FNV-1a hash over the raw increment bytes and the dimensions.
    std::uint64_t fingerprint() const;

    bool operator==(const NoisePath& other) const {
        return noise_dim_ == other.noise_dim_ && steps_ == other.steps_ &&
               increments_ == other.increments_;
    }

private:
    std::size_t noise_dim_;
    std::size_t steps_;
    std::vector<double> increments_;
    std::optional<std::uint64_t> seed_;
};

/// Independent N(0, tau) increments for rho = 1..d1, i = 1..n.
NoisePath sample_increments(const TimeGrid& tg, std::size_t noise_dim, std::uint64_t seed);

/// All-zero increments; reduces the scheme to deterministic implicit Euler.
NoisePath zero_noise(const TimeGrid& tg, std::size_t noise_dim);

/// Standard normal draw for the key (seed, rho, i).
double keyed_standard_normal(std::uint64_t seed, std::uint64_t rho, std::uint64_t i);

/// Derives the seed of Monte Carlo path `path` from a base seed.
std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path);

/// Binary layout: "SPDEPATH", u32 d1, u32 n, then d1*n little-endian f64
/// values row-major [rho][i].
void write_noise_path(const NoisePath& path, const std::filesystem::path& file);
NoisePath read_noise_path(const std::filesystem::path& file);

}  // namespace spde
