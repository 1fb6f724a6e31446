#include "elliptail/simulation.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "elliptail/error.hpp"

namespace elliptail {

namespace {

std::mt19937_64 shard_engine(std::uint64_t seed, std::uint64_t shard) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
    return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1), built from the top 53 bits so that the
// stream is identical across standard library implementations.
double open_uniform(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

}  // namespace

unsigned worker_count() {
    if (const char* env = std::getenv("ELLIPTAIL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SampleSet sample_pairs(const EllipticalPair& pair, std::size_t n, std::uint64_t seed, const SamplerOptions& opts) {
    if (n == 0) throw DomainError("sample_pairs: n must be >= 1");
    if (opts.shard_size == 0) throw DomainError("sample_pairs: shard_size must be >= 1");

    SampleSet out;
    out.pairs.resize(n);
    out.seed = seed;
    out.model_label = pair.model().label();
    out.rho_true = pair.rho();

    const double psi = std::acos(pair.rho());
    const RadialModel& model = pair.model();
    const std::size_t shards = (n + opts.shard_size - 1) / opts.shard_size;

    auto fill_shard = [&](std::size_t shard) {
        auto eng = shard_engine(seed, shard);
        const std::size_t begin = shard * opts.shard_size;
        const std::size_t end = std::min(n, begin + opts.shard_size);
        for (std::size_t i = begin; i < end; ++i) {
            const double theta = std::numbers::pi * (2.0 * open_uniform(eng) - 1.0);
            const double r = model.quantile(open_uniform(eng));
            if (!std::isfinite(r)) throw ModelError("sample_pairs: quantile returned a non-finite radius");
            out.pairs[i] = {r * std::cos(theta), r * std::cos(theta - psi)};
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(shards, opts.threads ? opts.threads : worker_count()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < shards; ++k) fill_shard(k);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < shards; k = next++) {
                try {
                    fill_shard(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = shards;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

EmpiricalEstimate empirical_joint_survival(const SampleSet& s, double x, double y) {
    if (s.pairs.empty()) throw DomainError("empirical_joint_survival: empty sample");
    std::size_t hits = 0;
    for (const auto& p : s.pairs) hits += (p.x > x && p.y > y);
    const double n = static_cast<double>(s.pairs.size());
    const double est = static_cast<double>(hits) / n;
    return {est, std::sqrt(est * (1.0 - est) / n)};
}

std::vector<double> z_transform(const SampleSet& s, double zeta, double rho) {
    const double norm2 = zeta * zeta + 2.0 * zeta * rho + 1.0;
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw DomainError("z_transform: requires zeta^2 + 2 zeta rho + 1 > 0");
    const double norm = std::sqrt(norm2);
    std::vector<double> z;
    z.reserve(s.pairs.size());
    for (const auto& p : s.pairs) z.push_back((zeta * p.x + p.y) / norm);
    return z;
}

void write_pairs_csv(std::ostream& out, const SampleSet& s) {
    out << "x,y\n";
    char buf[64];
    for (const auto& p : s.pairs) {
        const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
        out.write(buf, len);
    }
    if (!out) throw IoError("write_pairs_csv: write failed");
}

void write_pairs_csv(const std::filesystem::path& path, const SampleSet& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_pairs_csv(out, s);
    out.close();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

SampleSet read_pairs_csv(std::istream& in) {
    SampleSet s;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line == "x,y") continue;
        }
        const auto comma = line.find(',');
        Pair p{};
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos ||
            !parse_double(std::string_view(line).substr(0, comma), p.x) ||
            !parse_double(std::string_view(line).substr(comma + 1), p.y)) {
            std::ostringstream msg;
            msg << "pairs CSV line " << line_no << ": expected two finite numbers 'x,y', got '" << line << "'";
            throw IoError(msg.str());
        }
        s.pairs.push_back(p);
    }
    if (in.bad()) throw IoError("pairs CSV: read failed");
    if (s.pairs.empty()) throw IoError("pairs CSV: no data rows");
    return s;
}

SampleSet read_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open pairs file '" + path.string() + "'");
    return read_pairs_csv(in);
}

}  // namespace elliptail
