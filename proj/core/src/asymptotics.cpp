#include "elliptail/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "elliptail/error.hpp"
#include "elliptail/exact_tail.hpp"
#include "elliptail/normal.hpp"
#include "elliptail/tail_geometry.hpp"

namespace elliptail {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_point(double rho, double x, double y) {
    std::ostringstream s;
    s << "(rho=" << rho << ", x=" << x << ", y=" << y << ")";
    return s.str();
}

void push_A(std::vector<CorrectionTerm>& terms, const RadialModel& model, const char* label, double u) {
    if (auto a = model.second_order_A(u)) terms.push_back({label, *a});
}

// Region shared by thm1a, thm2 and thm3: y in (rho x, x] and alpha >= 1 + margin.
TailGeometry require_thm1a_region(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins,
                                  const char* op) {
    const double rho = pair.rho();
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError(std::string(op) + ": x and y must be finite and > 0");
    if (y > x)
        throw RegimeError(std::string(op) + ": requires y <= x " + format_point(rho, x, y) +
                              "; exchange x and y (the pair is exchangeable)",
                          "swap");
    if (!(y > rho * x))
        throw RegimeError(std::string(op) + ": requires y > rho x " + format_point(rho, x, y),
                          rho > 0.0 && y / x <= rho - margins.ratio_margin ? "1c" : "1b");
    const TailGeometry g = geometry_at(rho, x, y);
    if (g.alpha < 1.0 + margins.alpha_margin) {
        std::ostringstream msg;
        msg << op << ": alpha = " << g.alpha << " is below 1 + " << margins.alpha_margin << " "
            << format_point(rho, x, y) << "; the point is near the y = rho x edge";
        throw RegimeError(msg.str(), "1b");
    }
    return g;
}

double g1_factor(const RadialModel& model, double alpha, double x) {
    const double w_ax = model.scaling_w(alpha * x);
    return std::sqrt(model.scaling_w(x) / (alpha * x)) / w_ax *
           std::exp(model.log_survival(alpha * x) - model.log_survival(x));
}

double g2_factor(const EllipticalPair& pair, double alpha, double x, const QuadratureOptions& opts) {
    const double upper = marginal_survival_exact(pair, alpha * x, opts).value;
    const double base = marginal_survival_exact(pair, x, opts).value;
    return upper / (std::sqrt(x * pair.model().scaling_w(alpha * x)) * base);
}

}  // namespace

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::thm1a: return "thm1a";
        case Regime::thm1b: return "thm1b";
        case Regime::thm1c: return "thm1c";
        case Regime::thm2: return "thm2";
        case Regime::thm3: return "thm3";
        case Regime::marginal: return "marginal";
    }
    return "unknown";
}

Regime parse_regime(std::string_view text) {
    if (text.starts_with("thm")) text.remove_prefix(3);
    if (text == "1a") return Regime::thm1a;
    if (text == "1b") return Regime::thm1b;
    if (text == "1c") return Regime::thm1c;
    if (text == "2") return Regime::thm2;
    if (text == "3") return Regime::thm3;
    if (text == "marginal") return Regime::marginal;
    throw DomainError("unknown regime '" + std::string(text) + "' (expected 1a, 1b, 1c, 2, 3 or marginal)");
}

double h_of(const RadialModel& model, double x) { return x * model.scaling_w(x); }

TailEstimate thm1a_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins) {
    const TailGeometry g = require_thm1a_region(pair, x, y, margins, "thm1a");
    const auto& model = pair.model();
    const double ax = g.alpha * x;
    const double xw = x * model.scaling_w(ax);

    TailEstimate est;
    est.regime = Regime::thm1a;
    est.value = g.alpha * *g.K / kTwoPi * model.survival(ax) / xw;
    push_A(est.correction_terms, model, "A(alpha x)", ax);
    est.correction_terms.push_back({"1/(x w(alpha x))", 1.0 / xw});
    return est;
}

double thm1b_z_for(const EllipticalPair& pair, double x, double y) {
    const double rho = pair.rho();
    const double h = h_of(pair.model(), x);
    return (y / x - rho - rho / h) * std::sqrt(h) / std::sqrt(1.0 - rho * rho);
}

TailEstimate thm1b_joint(const EllipticalPair& pair, double x, double z, const RegimeMargins& margins) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("thm1b: x must be finite and > 0");
    if (!std::isfinite(z) || std::fabs(z) > margins.z_bound) {
        std::ostringstream msg;
        msg << "thm1b: |z| = " << std::fabs(z) << " exceeds the bound " << margins.z_bound;
        throw RegimeError(msg.str(), z > 0.0 ? "1a" : "1c");
    }
    const auto& model = pair.model();
    const double rho = pair.rho();
    const double h = h_of(model, x);
    if (!(h > 1.0)) {
        std::ostringstream msg;
        msg << "thm1b: h(x) = x w(x) = " << h << " <= 1; x = " << x << " is not in the asymptotic regime";
        throw RegimeError(msg.str(), "exact");
    }
    TailEstimate est;
    est.regime = Regime::thm1b;
    est.implied_y = x * (rho + z * std::sqrt(1.0 - rho * rho) / std::sqrt(h) + rho / h);
    est.value = model.survival(x) / std::sqrt(kTwoPi * h) * normal_sf(z);
    push_A(est.correction_terms, model, "A(x)", x);
    est.correction_terms.push_back({"1/h(x)", 1.0 / h});
    return est;
}

TailEstimate thm1c_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins) {
    const double rho = pair.rho();
    if (!(x > 0.0) || !(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError("thm1c: requires x > 0 and y >= 0");
    if (!(rho > 0.0)) throw RegimeError("thm1c: requires rho > 0", "1b");
    if (y / x > rho - margins.ratio_margin) {
        std::ostringstream msg;
        msg << "thm1c: requires y/x <= rho - " << margins.ratio_margin << " " << format_point(rho, x, y);
        throw RegimeError(msg.str(), y / x > rho ? "1a" : "1b");
    }
    const auto& model = pair.model();
    const double h = h_of(model, x);
    const double offset = y / x - rho;
    const double alpha = std::sqrt(1.0 + offset * offset / (1.0 - rho * rho));

    TailEstimate est;
    est.regime = Regime::thm1c;
    est.value = model.survival(x) / std::sqrt(kTwoPi * h);
    push_A(est.correction_terms, model, "A(x)", x);
    est.correction_terms.push_back({"1/h(x)", 1.0 / h});
    // Rapid variation makes this ratio o(1).
    est.correction_terms.push_back(
        {"S(alpha x)/(S(x) sqrt(h(x)))", std::exp(model.log_survival(alpha * x) - model.log_survival(x)) / std::sqrt(h)});
    return est;
}

TailEstimate thm2_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins,
                        MarginalPlugIn marginal, const QuadratureOptions& opts) {
    const TailGeometry g = require_thm1a_region(pair, x, y, margins, "thm2");
    const auto& model = pair.model();
    const double ax = g.alpha * x;
    const double xw = x * model.scaling_w(ax);
    const double tail = marginal == MarginalPlugIn::exact
                            ? marginal_survival_exact(pair, ax, opts).value
                            : model.survival(ax) / std::sqrt(kTwoPi * ax * model.scaling_w(ax));

    TailEstimate est;
    est.regime = Regime::thm2;
    est.value = std::pow(g.alpha, 1.5) * *g.K / std::sqrt(kTwoPi * xw) * tail;
    push_A(est.correction_terms, model, "A(alpha x)", ax);
    est.correction_terms.push_back({"1/(x w(alpha x))", 1.0 / xw});
    return est;
}

TailEstimate marginal_berman(const EllipticalPair& pair, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("marginal_berman: x must be finite and > 0");
    const auto& model = pair.model();
    const double h = h_of(model, x);
    if (!(h > 1.0)) {
        std::ostringstream msg;
        msg << "marginal_berman: h(x) = " << h << " <= 1; x = " << x << " is not in the asymptotic regime";
        throw RegimeError(msg.str(), "exact");
    }
    TailEstimate est;
    est.regime = Regime::marginal;
    est.value = model.survival(x) / std::sqrt(kTwoPi * h);
    push_A(est.correction_terms, model, "A(x)", x);
    est.correction_terms.push_back({"1/h(x)", 1.0 / h});
    return est;
}

TailEstimate thm3_conditional(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins,
                              const QuadratureOptions& opts) {
    const TailGeometry g = require_thm1a_region(pair, x, y, margins, "thm3");
    const auto& model = pair.model();
    const double lead = std::pow(g.alpha, 1.5) * *g.K / std::sqrt(kTwoPi);

    TailEstimate est;
    est.regime = Regime::thm3;
    est.value = lead * g1_factor(model, g.alpha, x);
    est.alternate_value = lead * g2_factor(pair, g.alpha, x, opts);
    const double ax = g.alpha * x;
    push_A(est.correction_terms, model, "A(alpha x)", ax);
    est.correction_terms.push_back({"1/(x w(alpha x))", 1.0 / (x * model.scaling_w(ax))});
    return est;
}

TailEstimate thm3_shifted(const EllipticalPair& pair, double a, double x, double z, const QuadratureOptions& opts) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("thm3_shifted: x must be finite and > 0");
    if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("thm3_shifted: z must be finite and >= 0");
    const DirectionalConstants dc = directional_constants(pair.rho(), a);
    const auto& model = pair.model();
    const double ax = dc.alpha * x;
    const double lead = std::pow(dc.alpha, 1.5) * dc.K / std::sqrt(kTwoPi) * std::exp(-dc.lambda * z);

    TailEstimate est;
    est.regime = Regime::thm3;
    est.implied_y = a * x + z / model.scaling_w(ax);
    est.value = lead * g1_factor(model, dc.alpha, x);
    est.alternate_value = lead * g2_factor(pair, dc.alpha, x, opts);
    push_A(est.correction_terms, model, "A(alpha x)", ax);
    est.correction_terms.push_back({"1/(x w(alpha x))", 1.0 / (x * model.scaling_w(ax))});
    return est;
}

double integral_I_leading(double a, double x, const RadialModel& model) {
    if (!(a > 1.0)) throw DomainError("integral_I_leading: a must be > 1");
    if (!(x > 0.0)) throw DomainError("integral_I_leading: x must be > 0");
    return model.survival(a * x) / (a * std::sqrt(a * a - 1.0) * x * model.scaling_w(a * x));
}

double integral_I_near_one_leading(double z, double x, const RadialModel& model) {
    if (!(z >= 0.0)) throw DomainError("integral_I_near_one_leading: z must be >= 0");
    if (!(x > 0.0)) throw DomainError("integral_I_near_one_leading: x must be > 0");
    return model.survival(x) / std::sqrt(h_of(model, x)) * std::sqrt(kTwoPi) * normal_sf(std::sqrt(2.0 * z));
}

RegimeChoice classify_regime(double rho, double x, double y, const RegimeMargins& margins) {
    if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
    if (!(x >= 0.0) || !(y >= 0.0) || !(x > 0.0 || y > 0.0))
        throw DomainError("classify_regime: thresholds must be >= 0 and not both zero");
    const double t = std::min(x, y) / std::max(x, y);
    const double root = std::sqrt(1.0 - rho * rho);
    const double edge_1a = rho + std::sqrt((1.0 + margins.alpha_margin) * (1.0 + margins.alpha_margin) - 1.0) * root;
    const double strip = margins.strip_width * root;
    const double edge_1c = rho - margins.ratio_margin;

    if (t > rho && t >= edge_1a) return {Regime::thm1a, false, t};
    if (std::fabs(t - rho) <= strip) return {Regime::thm1b, false, t};
    if (rho > 0.0 && t <= edge_1c) return {Regime::thm1c, false, t};
    if (t > rho) return {(edge_1a - t) < (t - rho - strip) ? Regime::thm1a : Regime::thm1b, true, t};
    return {(t - edge_1c) < (rho - strip - t) ? Regime::thm1c : Regime::thm1b, true, t};
}

AutoEstimate auto_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins) {
    if (y > x) std::swap(x, y);
    const RegimeChoice choice = classify_regime(pair.rho(), x, y, margins);

    auto evaluate = [&](Regime r, const RegimeMargins& m) {
        switch (r) {
            case Regime::thm1a: return thm1a_joint(pair, x, y, m);
            case Regime::thm1c: return thm1c_joint(pair, x, y, m);
            default: return thm1b_joint(pair, x, thm1b_z_for(pair, x, y), m);
        }
    };

    AutoEstimate out{evaluate(choice.regime, choice.boundary ? RegimeMargins{0.0, 0.0, 0.0, margins.z_bound} : margins),
                     choice.boundary, std::nullopt};
    if (choice.boundary) {
        const Regime other = choice.regime == Regime::thm1b ? (choice.ratio > pair.rho() ? Regime::thm1a : Regime::thm1c)
                                                             : Regime::thm1b;
        try {
            out.estimate.alternate_value = evaluate(other, RegimeMargins{0.0, 0.0, 0.0, margins.z_bound}).value;
            out.alternate_regime = other;
        } catch (const RegimeError&) {
            // The neighbouring expansion is undefined here (e.g. |z| out of bounds).
        }
    }
    return out;
}

}  // namespace elliptail
