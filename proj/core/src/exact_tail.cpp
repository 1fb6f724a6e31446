#include "elliptail/exact_tail.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "elliptail/error.hpp"
#include "elliptail/tail_geometry.hpp"

namespace elliptail {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

void check_threshold(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << name << " must be finite and >= 0";
        throw DomainError(msg.str());
    }
}

// S(r / c) for c = cos(angle) > 0, without forming r / 0.
double survival_over_cos(const RadialModel& model, double r, double c) {
    if (r == 0.0) return 1.0;
    if (!(c > 0.0)) return 0.0;
    return model.survival(r / c);
}

}  // namespace

QuadratureResult integral_I(double a, double x, const RadialModel& model, const QuadratureOptions& opts) {
    if (!(a >= 1.0) || !std::isfinite(a)) throw DomainError("integral_I: a must be finite and >= 1");
    check_threshold(x, "integral_I: x");
    const double lo = std::acos(1.0 / a);
    if (x == 0.0) return {kHalfPi - lo, 0.0, 0};
    auto f = [&](double t) { return survival_over_cos(model, x, std::cos(t)); };
    const auto pts = geometric_breakpoints(lo, kHalfPi, true);
    return integrate_partitioned(f, pts, opts);
}

QuadratureResult integral_I_hyperbolic(double a, double x, const RadialModel& model, const QuadratureOptions& opts) {
    if (!(a >= 1.0) || !std::isfinite(a)) throw DomainError("integral_I_hyperbolic: a must be finite and >= 1");
    check_threshold(x, "integral_I_hyperbolic: x");
    const double t0 = std::acosh(a);
    if (x == 0.0) return {kHalfPi - std::acos(1.0 / a), 0.0, 0};
    // Map [t0, inf) onto [0, 1) with t = t0 + u / (1 - u); the integrand is
    // concentrated at u = 0.
    auto f = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double one_minus = 1.0 - u;
        const double t = t0 + u / one_minus;
        const double ch = std::cosh(t);
        if (!std::isfinite(ch)) return 0.0;
        const double v = model.survival(x * ch);
        return v == 0.0 ? 0.0 : v / (ch * one_minus * one_minus);
    };
    const auto pts = geometric_breakpoints(0.0, 1.0, true);
    return integrate_partitioned(f, pts, opts);
}

QuadratureResult joint_survival_exact(const EllipticalPair& pair, double x, double y, const QuadratureOptions& opts,
                                      bool cross_validate) {
    check_threshold(x, "joint_survival_exact: x");
    check_threshold(y, "joint_survival_exact: y");
    if (y > x) std::swap(x, y);
    const double rho = pair.rho();
    const double psi = std::acos(rho);
    const auto& model = pair.model();

    if (x == 0.0) return {(kPi - psi) / (2.0 * kPi), 0.0, 0};

    const double theta1 = std::atan((y / x - rho) / std::sqrt(1.0 - rho * rho));
    const double lower = psi - kHalfPi;

    QuadratureResult total;
    {
        auto f = [&](double t) { return survival_over_cos(model, x, std::cos(t)); };
        const auto pts = geometric_breakpoints(theta1, kHalfPi, true);
        total += integrate_partitioned(f, pts, opts);
    }
    if (y == 0.0) {
        total.value += theta1 - lower;
    } else if (theta1 > lower) {
        auto f = [&](double t) { return survival_over_cos(model, y, std::cos(t - psi)); };
        const auto pts = geometric_breakpoints(lower, theta1, false);
        total += integrate_partitioned(f, pts, opts);
    }
    total.value /= 2.0 * kPi;
    total.abs_error_estimate /= 2.0 * kPi;

    if (cross_validate && y > 0.0 && y != rho * x) {
        const QuadratureResult other = joint_survival_iform(pair, x, y, opts);
        const double gap = std::fabs(other.value - total.value);
        const double allowed = 10.0 * std::max(quadrature_target(opts, total.value),
                                               total.abs_error_estimate + other.abs_error_estimate);
        if (gap > allowed) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "joint_survival_exact: angular (" << total.value << ") and I-form (" << other.value
                << ") evaluations disagree by " << gap;
            throw QuadratureError(msg.str(), total.value, gap);
        }
    }
    return total;
}

QuadratureResult joint_survival_iform(const EllipticalPair& pair, double x, double y, const QuadratureOptions& opts) {
    check_threshold(x, "joint_survival_iform: x");
    check_threshold(y, "joint_survival_iform: y");
    if (y > x) std::swap(x, y);
    const double rho = pair.rho();
    if (!(x > 0.0 && y > 0.0)) throw DomainError("joint_survival_iform: requires x > 0 and y > 0");
    if (y == rho * x) throw DomainError("joint_survival_iform: degenerate at y = rho x");
    const auto& model = pair.model();
    const TailGeometry g = geometry_at(rho, x, y);

    QuadratureResult total = integral_I_hyperbolic(g.alpha, x, model, opts);
    const QuadratureResult i_beta = integral_I_hyperbolic(g.beta, y, model, opts);
    if (y < rho * x) {
        const QuadratureResult i_one = integral_I_hyperbolic(1.0, x, model, opts);
        total.value = 2.0 * i_one.value - total.value;
        total.abs_error_estimate += 2.0 * i_one.abs_error_estimate;
        total.evaluations += i_one.evaluations;
    }
    total += i_beta;
    total.value /= 2.0 * kPi;
    total.abs_error_estimate /= 2.0 * kPi;
    return total;
}

QuadratureResult marginal_survival_exact(const EllipticalPair& pair, double x, const QuadratureOptions& opts) {
    if (!std::isfinite(x)) throw DomainError("marginal_survival_exact: x must be finite");
    if (x < 0.0) {
        QuadratureResult upper = marginal_survival_exact(pair, -x, opts);
        upper.value = 1.0 - upper.value;
        return upper;
    }
    QuadratureResult r = integral_I(1.0, x, pair.model(), opts);
    r.value /= kPi;
    r.abs_error_estimate /= kPi;
    return r;
}

QuadratureResult conditional_survival_exact(const EllipticalPair& pair, double x, double y,
                                            const QuadratureOptions& opts) {
    const QuadratureResult marginal = marginal_survival_exact(pair, x, opts);
    if (!(marginal.value > 0.0) || marginal.value <= 10.0 * marginal.abs_error_estimate) {
        std::ostringstream msg;
        msg << "conditional_survival_exact: P(X > " << x << ") = " << marginal.value
            << " is too small relative to its error estimate " << marginal.abs_error_estimate
            << " for a reliable ratio";
        throw DomainError(msg.str());
    }
    const QuadratureResult joint = joint_survival_exact(pair, x, y, opts);
    const double value = joint.value / marginal.value;
    const double rel = (joint.value > 0.0 ? joint.abs_error_estimate / joint.value : 0.0) +
                       marginal.abs_error_estimate / marginal.value;
    const double abs_err = joint.value > 0.0 ? value * rel : joint.abs_error_estimate / marginal.value;
    return {value, abs_err, joint.evaluations + marginal.evaluations};
}

}  // namespace elliptail
