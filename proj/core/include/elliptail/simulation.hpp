#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elliptail/radial_model.hpp"

namespace elliptail {

struct Pair {
    double x;
    double y;
};

/// Independent copies of (X, Y).
struct SampleSet {
    std::vector<Pair> pairs;
    std::uint64_t seed = 0;
    std::string model_label;
    std::optional<double> rho_true;

    std::size_t size() const noexcept { return pairs.size(); }
};

struct SamplerOptions {
    /// Pairs per shard. Each shard owns the stream seeded by (seed, shard
    /// index), so output does not depend on the number of workers.
    std::size_t shard_size = 1 << 16;
    /// 0 means worker_count().
    unsigned threads = 0;
};

/// Worker cap: ELLIPTAIL_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned worker_count();

/// Draws (R cos T, R cos(T - arccos rho)) with T ~ U(-pi, pi) and R by
/// inverse survival of a uniform variate. Deterministic given the seed.
SampleSet sample_pairs(const EllipticalPair& pair, std::size_t n, std::uint64_t seed,
                       const SamplerOptions& opts = {});

struct EmpiricalEstimate {
    double estimate;
    double std_error;
};

/// Frequency of {X > x, Y > y} with binomial standard error.
EmpiricalEstimate empirical_joint_survival(const SampleSet& s, double x, double y);

/// (zeta X + Y) / sqrt(zeta^2 + 2 zeta rho + 1) for every pair.
std::vector<double> z_transform(const SampleSet& s, double zeta, double rho);

/// CSV with header "x,y" and 17 significant digits per value.
void write_pairs_csv(std::ostream& out, const SampleSet& s);
void write_pairs_csv(const std::filesystem::path& path, const SampleSet& s);

/// Reads the format written by write_pairs_csv. Throws IoError on malformed
/// input, non-finite values or an empty file.
SampleSet read_pairs_csv(std::istream& in);
SampleSet read_pairs_csv(const std::filesystem::path& path);

}  // namespace elliptail
