#include <CLI11.hpp>

#include <map>
#include <ostream>

#include "elliptail_cli/run.hpp"

namespace elliptail::cli {

namespace {

void add_model(CLI::App* sub, RunConfig& c) {
    sub->add_option("--model", c.model_path, "Radial model JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--rho", c.rho, "Pseudo-correlation in [0, 1)");
}

void add_tolerances(CLI::App* sub, RunConfig& c) {
    sub->add_option("--tol", c.rel_tol, "Relative quadrature tolerance");
    sub->add_option("--abs-tol", c.abs_tol, "Absolute quadrature tolerance");
}

void add_output(CLI::App* sub, RunConfig& c) {
    sub->add_option("--out", c.output_path, "Output CSV path ('-' for standard output)");
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Exact and asymptotic joint tails of bivariate elliptical vectors, with plug-in estimators"};
    app.name("elliptail");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    const std::string regimes = "auto|1a|1b|1c|2|3|marginal";

    CLI::App* exact = app.add_subcommand("exact", "Quadrature value of P(X>x,Y>y), P(X>x) or P(Y>y|X>x)");
    exact->option_defaults()->always_capture_default();
    add_model(exact, c);
    exact->add_option("--x", c.x, "Threshold for X")->required();
    exact->add_option("--y", c.y, "Threshold for Y");
    const std::map<std::string, ExactQuantity> quantities{{"joint", ExactQuantity::joint},
                                                          {"marginal", ExactQuantity::marginal},
                                                          {"conditional", ExactQuantity::conditional}};
    exact->add_option("--quantity", c.quantity, "joint|marginal|conditional")
        ->transform(CLI::CheckedTransformer(quantities, CLI::ignore_case))
        ->default_str("joint");
    add_tolerances(exact, c);
    exact->add_flag("--cross-validate", c.cross_validate, "Check the joint value against the I-integral form");
    add_output(exact, c);

    CLI::App* asym = app.add_subcommand("asymptotic", "Leading-order tail expansion with correction magnitudes");
    asym->option_defaults()->always_capture_default();
    add_model(asym, c);
    asym->add_option("--regime", c.regime, regimes);
    asym->add_option("--x", c.x, "Threshold for X")->required();
    asym->add_option("--y", c.y, "Threshold for Y");
    asym->add_option("--z", c.z, "Shift parameter (regime 1b: y from z; regime 3: y = a x + z / w(alpha x))");
    asym->add_option("--a", c.a, "Direction a in (rho, 1] for regime 3 with --z");
    add_tolerances(asym, c);
    add_output(asym, c);

    CLI::App* conv = app.add_subcommand("converge", "Ratio of expansion to quadrature over a grid of x");
    conv->option_defaults()->always_capture_default();
    add_model(conv, c);
    conv->add_option("--regime", c.regime, regimes);
    conv->add_option("--x-grid", c.x_grid, "Comma-separated x values")->delimiter(',')->required();
    conv->add_option("--y-ratio", c.y_ratio, "y = ratio * x (ignored when --z is given)");
    conv->add_option("--z", c.z, "Shift parameter for regimes 1b and 3");
    conv->add_option("--a", c.a, "Direction a in (rho, 1] for regime 3 with --z");
    add_tolerances(conv, c);
    add_output(conv, c);

    CLI::App* sim = app.add_subcommand("simulate", "Draw pairs (X, Y) and write them as CSV");
    sim->option_defaults()->always_capture_default();
    add_model(sim, c);
    sim->add_option("--n", c.n, "Number of pairs")->required();
    sim->add_option("--seed", c.seed, "Random seed");
    add_output(sim, c);

    CLI::App* est = app.add_subcommand("estimate", "Plug-in conditional survival or quantile from a pairs CSV");
    est->option_defaults()->always_capture_default();
    est->add_option("--pairs", c.pairs_path, "Pairs CSV (header x,y)")->required()->check(CLI::ExistingFile);
    est->add_option("--k-top", c.k_top, "Order statistics used by the fit (default ceil(2 sqrt(n)) in [30, n/2])");
    est->add_option("--x", c.x, "Conditioning threshold for X")->required();
    auto* y_opt = est->add_option("--y", c.y, "Threshold for Y: report P(Y>y|X>x)");
    auto* q_opt = est->add_option("--q", c.q, "Level q: report the conditional q-quantile of Y");
    y_opt->excludes(q_opt);
    est->add_option("--variant", c.variant, "Estimator variant 1 (fitted tail) or 2 (marginal survivals)")
        ->check(CLI::IsMember({1, 2}));
    est->add_option("--channel", c.channel, "Fit channel R|X|Z")->check(CLI::IsMember({"R", "X", "Z"}));
    est->add_option("--zeta", c.zeta, "zeta for the Z channel");
    est->add_option("--below-x", c.below_x, "Policy for y < x: extrapolate|empirical")
        ->check(CLI::IsMember({"extrapolate", "empirical"}));
    add_output(est, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    if (exact->parsed()) c.command = Command::exact;
    else if (asym->parsed()) c.command = Command::asymptotic;
    else if (conv->parsed()) c.command = Command::converge;
    else if (sim->parsed()) c.command = Command::simulate;
    else c.command = Command::estimate;
    return run(c, out, err);
}

}  // namespace elliptail::cli
