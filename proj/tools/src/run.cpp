#include "elliptail_cli/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "elliptail/asymptotics.hpp"
#include "elliptail/error.hpp"
#include "elliptail/estimators.hpp"
#include "elliptail/exact_tail.hpp"
#include "elliptail/model_io.hpp"
#include "elliptail/simulation.hpp"

namespace elliptail::cli {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

const char* flag(bool b) { return b ? "1" : "0"; }

double need(const std::optional<double>& v, const char* name, const char* command) {
    if (!v) throw DomainError(std::string(command) + ": --" + name + " is required");
    return *v;
}

QuadratureOptions quad_opts(const RunConfig& c) { return {c.abs_tol, c.rel_tol, QuadratureOptions{}.max_evaluations}; }

EllipticalPair load_pair(const RunConfig& c) {
    if (c.model_path.empty()) throw DomainError("--model is required");
    return EllipticalPair(c.rho, load_model(c.model_path));
}

std::string corrections(const TailEstimate& e) {
    std::string s;
    for (const auto& t : e.correction_terms) {
        if (!s.empty()) s += ';';
        s += t.label + "=" + num(t.magnitude);
    }
    return s;
}

void run_exact(const RunConfig& c, std::ostream& out) {
    const EllipticalPair pair = load_pair(c);
    const auto opts = quad_opts(c);
    const double x = need(c.x, "x", "exact");
    QuadratureResult r;
    const char* name = "joint";
    switch (c.quantity) {
        case ExactQuantity::joint:
            r = joint_survival_exact(pair, x, need(c.y, "y", "exact"), opts, c.cross_validate);
            break;
        case ExactQuantity::marginal:
            name = "marginal";
            r = marginal_survival_exact(pair, x, opts);
            break;
        case ExactQuantity::conditional:
            name = "conditional";
            r = conditional_survival_exact(pair, x, need(c.y, "y", "exact"), opts);
            break;
    }
    out << "quantity,rho,x,y,value,abs_error,evaluations\n";
    out << name << ',' << num(c.rho) << ',' << num(x) << ',' << opt_num(c.y) << ',' << num(r.value) << ','
        << num(r.abs_error_estimate) << ',' << r.evaluations << '\n';
}

struct Evaluated {
    TailEstimate estimate;
    double y;
    bool boundary = false;
    std::optional<Regime> alternate_regime;
    bool conditional = false;
};

Evaluated evaluate_regime(const EllipticalPair& pair, const RunConfig& c, double x, std::optional<double> y) {
    const auto opts = quad_opts(c);
    Evaluated e;
    if (c.regime == "auto") {
        const double yy = need(y, "y", "asymptotic --regime auto");
        AutoEstimate a = auto_joint(pair, x, yy);
        e.estimate = std::move(a.estimate);
        e.y = yy;
        e.boundary = a.boundary;
        e.alternate_regime = a.alternate_regime;
        return e;
    }
    switch (parse_regime(c.regime)) {
        case Regime::thm1a:
            e.y = need(y, "y", "regime 1a");
            e.estimate = thm1a_joint(pair, x, e.y);
            break;
        case Regime::thm1b: {
            const double z = c.z ? *c.z : thm1b_z_for(pair, x, need(y, "y", "regime 1b (or give --z)"));
            e.estimate = thm1b_joint(pair, x, z);
            e.y = *e.estimate.implied_y;
            break;
        }
        case Regime::thm1c:
            e.y = need(y, "y", "regime 1c");
            e.estimate = thm1c_joint(pair, x, e.y);
            break;
        case Regime::thm2:
            e.y = need(y, "y", "regime 2");
            e.estimate = thm2_joint(pair, x, e.y, {}, MarginalPlugIn::exact, opts);
            break;
        case Regime::thm3:
            e.conditional = true;
            if (c.z) {
                e.estimate = thm3_shifted(pair, c.a, x, *c.z, opts);
                e.y = *e.estimate.implied_y;
            } else {
                e.y = need(y, "y", "regime 3 (or give --z)");
                e.estimate = thm3_conditional(pair, x, e.y, {}, opts);
            }
            break;
        case Regime::marginal:
            e.estimate = marginal_berman(pair, x);
            e.y = std::nan("");
            break;
    }
    return e;
}

double exact_for(const EllipticalPair& pair, const RunConfig& c, const Evaluated& e, double x) {
    const auto opts = quad_opts(c);
    if (e.estimate.regime == Regime::marginal) return marginal_survival_exact(pair, x, opts).value;
    if (e.conditional) return conditional_survival_exact(pair, x, e.y, opts).value;
    return joint_survival_exact(pair, x, e.y, opts).value;
}

void run_asymptotic(const RunConfig& c, std::ostream& out) {
    const EllipticalPair pair = load_pair(c);
    const double x = need(c.x, "x", "asymptotic");
    const Evaluated e = evaluate_regime(pair, c, x, c.y);
    out << "regime,x,y,value,boundary,alternate_regime,alternate_value,corrections\n";
    out << to_string(e.estimate.regime) << ',' << num(x) << ',' << (std::isnan(e.y) ? "" : num(e.y)) << ','
        << num(e.estimate.value) << ',' << flag(e.boundary) << ','
        << (e.alternate_regime ? std::string(to_string(*e.alternate_regime)) : std::string()) << ','
        << opt_num(e.estimate.alternate_value) << ',' << corrections(e.estimate) << '\n';
}

void run_converge(const RunConfig& c, std::ostream& out) {
    const EllipticalPair pair = load_pair(c);
    out << "regime,x,y,exact,asymptotic,ratio\n";
    for (double x : c.x_grid) {
        RunConfig point = c;
        if (c.regime == "1b" && !c.z) point.z = 0.0;
        const Evaluated e = evaluate_regime(pair, point, x, c.y_ratio * x);
        const double exact = exact_for(pair, point, e, x);
        out << to_string(e.estimate.regime) << ',' << num(x) << ',' << (std::isnan(e.y) ? "" : num(e.y)) << ','
            << num(exact) << ',' << num(e.estimate.value) << ',' << num(e.estimate.value / exact) << '\n';
    }
}

void run_simulate(const RunConfig& c, std::ostream& out) {
    const EllipticalPair pair = load_pair(c);
    const SampleSet s = sample_pairs(pair, c.n, c.seed);
    write_pairs_csv(out, s);
}

void run_estimate(const RunConfig& c, std::ostream& out) {
    const SampleSet s = read_pairs_csv(std::filesystem::path(c.pairs_path));
    const std::size_t k = c.k_top ? *c.k_top : default_k_top(s.size());
    const FittedModel fit = fit_scaling(s, k, parse_channel(c.channel, c.zeta));
    const PlugIn plug = fitted_plugin(s, fit);
    const PsiVariant variant = parse_variant(c.variant);
    const double x = need(c.x, "x", "estimate");

    const std::string prefix = num(fit.rho_hat) + ',' + num(fit.c_hat) + ',' + num(fit.delta_hat) + ',' +
                               std::to_string(fit.k_top) + ',' + to_string(fit.channel) + ',' + num(fit.residual) +
                               ',' + std::to_string(c.variant) + ',' + num(x);
    if (c.y) {
        PsiOptions po;
        po.below_x = c.below_x == "empirical" ? BelowXPolicy::empirical_ratio : BelowXPolicy::extrapolate;
        const PsiResult r = psi_hat(plug, variant, x, *c.y, po);
        out << "rho_hat,c_hat,delta_hat,k_top,channel,residual,variant,x,y,psi_hat,clamped,below_x,"
               "empirical_fallback,rho_clamped\n";
        out << prefix << ',' << num(*c.y) << ',' << num(r.value) << ',' << flag(r.clamped) << ','
            << flag(r.below_x) << ',' << flag(r.empirical_fallback) << ',' << flag(plug.rho_clamped) << '\n';
    } else {
        const QuantileResult r = quantile_hat(plug, variant, *c.q, x);
        out << "rho_hat,c_hat,delta_hat,k_top,channel,residual,variant,x,q,y_hat,below_x,rho_clamped\n";
        out << prefix << ',' << num(*c.q) << ',' << num(r.value) << ',' << flag(r.below_x) << ','
            << flag(plug.rho_clamped) << '\n';
    }
}

}  // namespace

void validate(const RunConfig& c) {
    if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0)) throw DomainError("tolerances must be > 0");
    if (c.regime != "auto") parse_regime(c.regime);
    switch (c.command) {
        case Command::exact:
            if (!c.x) throw DomainError("exact: --x is required");
            if (c.quantity != ExactQuantity::marginal && !c.y) throw DomainError("exact: --y is required");
            break;
        case Command::asymptotic:
            if (!c.x) throw DomainError("asymptotic: --x is required");
            break;
        case Command::converge:
            if (c.x_grid.empty()) throw DomainError("converge: --x-grid must list at least one value");
            if (c.regime == "auto" && c.z) throw DomainError("converge: --z needs an explicit --regime 1b or 3");
            break;
        case Command::simulate:
            if (c.n == 0) throw DomainError("simulate: --n must be >= 1");
            break;
        case Command::estimate:
            if (c.pairs_path.empty()) throw DomainError("estimate: --pairs is required");
            if (!c.x) throw DomainError("estimate: --x is required");
            if (c.y.has_value() == c.q.has_value()) throw DomainError("estimate: give exactly one of --y and --q");
            if (c.below_x != "extrapolate" && c.below_x != "empirical")
                throw DomainError("estimate: --below-x must be 'extrapolate' or 'empirical'");
            parse_variant(c.variant);
            parse_channel(c.channel, c.zeta);
            break;
    }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        // Build the whole output first so that failures never leave a partial file.
        std::ostringstream buffer;
        switch (config.command) {
            case Command::exact: run_exact(config, buffer); break;
            case Command::asymptotic: run_asymptotic(config, buffer); break;
            case Command::converge: run_converge(config, buffer); break;
            case Command::simulate: run_simulate(config, buffer); break;
            case Command::estimate: run_estimate(config, buffer); break;
        }
        if (config.output_path == "-") {
            out << buffer.str();
            out.flush();
            if (!out) throw IoError("write to standard output failed");
        } else {
            std::ofstream file(config.output_path, std::ios::binary);
            if (!file) throw IoError("cannot open '" + config.output_path + "' for writing");
            file << buffer.str();
            file.close();
            if (!file) throw IoError("write to '" + config.output_path + "' failed");
        }
        return 0;
    } catch (const RegimeError& e) {
        err << "elliptail: error: " << e.what();
        if (!e.suggested().empty()) err << " [suggested: " << e.suggested() << "]";
        err << '\n';
    } catch (const std::exception& e) {
        err << "elliptail: error: " << e.what() << '\n';
    }
    return 1;
}

}  // namespace elliptail::cli
