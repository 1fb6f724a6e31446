#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace elliptail::cli {

enum class Command { exact, asymptotic, converge, simulate, estimate };

enum class ExactQuantity { joint, marginal, conditional };

struct RunConfig {
    Command command = Command::exact;

    // Model and probability queries.
    std::string model_path;
    double rho = 0.0;
    std::optional<double> x;
    std::optional<double> y;
    std::optional<double> z;
    double a = 1.0;
    ExactQuantity quantity = ExactQuantity::joint;
    std::string regime = "auto";
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    bool cross_validate = false;

    // converge
    std::vector<double> x_grid;
    double y_ratio = 1.0;

    // simulate
    std::size_t n = 0;
    std::uint64_t seed = 1;

    // estimate
    std::string pairs_path;
    std::optional<std::size_t> k_top;
    std::optional<double> q;
    int variant = 1;
    std::string channel = "R";
    double zeta = 1.0;
    std::string below_x = "extrapolate";

    /// "-" writes to standard output.
    std::string output_path = "-";
};

/// Throws elliptail::DomainError when flags are inconsistent for the command.
void validate(const RunConfig& config);

/// Executes the command, writing CSV to the configured output (or `out` for "-").
/// Returns 0 on success, nonzero with one diagnostic line on `err` on failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (including argv[0]) and calls run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace elliptail::cli
