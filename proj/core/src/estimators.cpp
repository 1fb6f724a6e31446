#include "elliptail/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "elliptail/error.hpp"
#include "elliptail/exact_tail.hpp"
#include "elliptail/normal.hpp"
#include "elliptail/tail_geometry.hpp"

namespace elliptail {

namespace {

constexpr std::size_t kMinExceedances = 10;

std::vector<double> channel_values(const SampleSet& s, const Channel& channel, double rho_hat) {
    std::vector<double> v;
    v.reserve(s.size());
    switch (channel.kind) {
        case Channel::Kind::X:
            for (const auto& p : s.pairs) v.push_back(p.x);
            break;
        case Channel::Kind::Z:
            v = z_transform(s, channel.zeta, rho_hat);
            break;
        case Channel::Kind::R: {
            if (!(std::fabs(rho_hat) < 1.0)) throw EstimationError("fit_scaling: |rho_hat| = 1, radius channel undefined");
            const double root = std::sqrt(1.0 - rho_hat * rho_hat);
            for (const auto& p : s.pairs) {
                const double s2 = (p.y - rho_hat * p.x) / root;
                v.push_back(std::hypot(p.x, s2));
            }
            break;
        }
    }
    return v;
}

// k-th largest value (k >= 1).
double kth_largest(std::vector<double> v, std::size_t k) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end(), std::greater<>());
    return v[k - 1];
}

void check_x(const PlugIn& plug, double x, const char* op) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(op) + ": x must be finite and > 0");
    if (x < plug.x_threshold) {
        std::ostringstream msg;
        msg << op << ": x = " << x << " is below the tail region of the fit (x >= " << plug.x_threshold
            << "); lower k_top or raise x";
        throw EstimationError(msg.str());
    }
}

struct Shape {
    double lead;   // alpha^{3/2} K / sqrt(2 pi)
    double alpha;
    double lambda;
    double w_ax;   // w_hat(alpha x)
    double g;
};

Shape shape_at(const PlugIn& plug, PsiVariant variant, double x) {
    const DirectionalConstants dc = directional_constants(plug.rho, 1.0);
    const double ax = dc.alpha * x;
    const double w_ax = plug.w(ax);
    if (!(w_ax > 0.0) || !std::isfinite(w_ax)) throw EstimationError("psi_hat: fitted w(alpha x) is not positive");
    double g;
    if (variant == PsiVariant::g1) {
        g = std::sqrt(plug.w(x) / ax) / w_ax * std::exp(plug.log_survival(ax) - plug.log_survival(x));
    } else {
        const double base = plug.marginal_x(x);
        if (!(base > 0.0)) throw EstimationError("psi_hat: marginal survival estimate at x is zero");
        g = plug.marginal_x(ax) / (std::sqrt(x * w_ax) * base);
    }
    if (!(g > 0.0) || !std::isfinite(g)) throw EstimationError("psi_hat: g_hat is not positive and finite");
    return {std::pow(dc.alpha, 1.5) * dc.K / std::sqrt(2.0 * std::numbers::pi), dc.alpha, dc.lambda, w_ax, g};
}

}  // namespace

std::string to_string(const Channel& channel) {
    switch (channel.kind) {
        case Channel::Kind::R: return "R";
        case Channel::Kind::X: return "X";
        case Channel::Kind::Z: {
            std::ostringstream s;
            s << "Z(zeta=" << channel.zeta << ")";
            return s.str();
        }
    }
    return "?";
}

Channel parse_channel(const std::string& text, double zeta) {
    if (text == "R" || text == "r") return Channel::radius();
    if (text == "X" || text == "x") return Channel::first_coordinate();
    if (text == "Z" || text == "z") return Channel::z(zeta);
    throw DomainError("unknown channel '" + text + "' (expected R, X or Z)");
}

double FittedModel::w(double x) const { return c_hat * delta_hat * std::pow(x, delta_hat - 1.0); }

double FittedModel::log_tail(double x) const { return -c_hat * std::pow(x, delta_hat); }

double estimate_rho(const SampleSet& s) {
    const std::size_t n = s.size();
    if (n < 10) throw EstimationError("estimate_rho: need at least 10 pairs");
    double mx = 0.0, my = 0.0;
    for (const auto& p : s.pairs) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& p : s.pairs) {
        const double dx = p.x - mx;
        const double dy = p.y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw EstimationError("estimate_rho: zero variance in a coordinate");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::size_t default_k_top(std::size_t n) {
    const auto k = static_cast<std::size_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(n))));
    return std::min(std::max<std::size_t>(k, 30), n / 2);
}

FittedModel fit_scaling(const SampleSet& s, std::size_t k_top, const Channel& channel) {
    const std::size_t n = s.size();
    if (k_top < 30 || 2 * k_top > n) {
        std::ostringstream msg;
        msg << "fit_scaling: k_top = " << k_top << " must lie in [30, n/2] (n = " << n << ")";
        throw DomainError(msg.str());
    }
    FittedModel fit;
    fit.rho_hat = estimate_rho(s);
    fit.k_top = k_top;
    fit.n = n;
    fit.channel = channel;

    std::vector<double> v = channel_values(s, channel, fit.rho_hat);
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k_top), v.end(), std::greater<>());
    if (!(v[k_top - 1] > 0.0))
        throw EstimationError("fit_scaling: non-positive order statistics in the fit region; lower k_top");

    const double np1 = static_cast<double>(n) + 1.0;
    std::vector<double> lx(k_top), ly(k_top);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k_top; ++i) {
        lx[i] = std::log(v[i]);
        ly[i] = std::log(-std::log(static_cast<double>(i + 1) / np1));
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(k_top);
    my /= static_cast<double>(k_top);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k_top; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw EstimationError("fit_scaling: fit region has no spread (tied order statistics)");
    fit.delta_hat = sxy / sxx;
    if (!(fit.delta_hat > 0.0)) throw EstimationError("fit_scaling: fitted delta is not positive");
    const double intercept = my - fit.delta_hat * mx;
    fit.c_hat = std::exp(intercept);

    double ss = 0.0;
    for (std::size_t i = 0; i < k_top; ++i) {
        const double r = ly[i] - intercept - fit.delta_hat * lx[i];
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(k_top));
    fit.fit_threshold = v[k_top - 1];

    std::vector<double> xs;
    xs.reserve(n);
    for (const auto& p : s.pairs) xs.push_back(p.x);
    fit.x_threshold = kth_largest(std::move(xs), k_top);
    return fit;
}

PlugIn fitted_plugin(const SampleSet& s, const FittedModel& fit) {
    if (!(fit.c_hat > 0.0) || !(fit.delta_hat > 0.0)) throw EstimationError("fitted model has non-positive c or delta");
    if (!(fit.rho_hat < 1.0)) throw EstimationError("rho_hat = 1: tail constants undefined");
    PlugIn plug;
    plug.rho = std::max(fit.rho_hat, 0.0);
    plug.rho_clamped = fit.rho_hat < 0.0;
    plug.w = [fit](double u) { return fit.w(u); };
    plug.log_survival = [fit](double u) { return fit.log_tail(u); };
    plug.x_threshold = fit.x_threshold;
    plug.source = "fit[" + to_string(fit.channel) + "]";

    auto sorted = std::make_shared<std::vector<double>>();
    sorted->reserve(s.size());
    for (const auto& p : s.pairs) sorted->push_back(p.x);
    std::sort(sorted->begin(), sorted->end());
    plug.sorted_x = sorted;
    plug.pairs = std::make_shared<const std::vector<Pair>>(s.pairs);

    const std::size_t n = sorted->size();
    const double splice = n >= kMinExceedances ? (*sorted)[n - kMinExceedances] : -INFINITY;
    plug.splice_point = splice;

    std::function<double(double)> fitted_tail;
    if (fit.channel.kind == Channel::Kind::R) {
        const EllipticalPair fitted_pair(plug.rho, make_kotz({1.0, 0.0, fit.c_hat, fit.delta_hat, std::nullopt, 1.0,
                                                              "fitted"}));
        fitted_tail = [fitted_pair](double u) { return marginal_survival_exact(fitted_pair, u).value; };
    } else {
        fitted_tail = [fit](double u) { return std::exp(fit.log_tail(u)); };
    }
    plug.marginal_x = [sorted, splice, fitted_tail](double u) {
        if (u < splice) {
            const auto above = sorted->end() - std::upper_bound(sorted->begin(), sorted->end(), u);
            return static_cast<double>(above) / static_cast<double>(sorted->size());
        }
        return fitted_tail(u);
    };
    return plug;
}

PlugIn oracle_plugin(const EllipticalPair& pair, const QuadratureOptions& opts) {
    PlugIn plug;
    plug.rho = pair.rho();
    const RadialModel model = pair.model();
    plug.w = [model](double u) { return model.scaling_w(u); };
    plug.log_survival = [model](double u) { return model.log_survival(u); };
    plug.marginal_x = [pair, opts](double u) { return marginal_survival_exact(pair, u, opts).value; };
    plug.source = "oracle[" + model.label() + "]";
    return plug;
}

PsiVariant parse_variant(int v) {
    if (v == 1) return PsiVariant::g1;
    if (v == 2) return PsiVariant::g2;
    throw DomainError("variant must be 1 or 2");
}

PsiResult psi_hat(const PlugIn& plug, PsiVariant variant, double x, double y, const PsiOptions& opts) {
    check_x(plug, x, "psi_hat");
    if (!std::isfinite(y)) throw DomainError("psi_hat: y must be finite");
    const Shape sh = shape_at(plug, variant, x);

    PsiResult r;
    r.g = sh.g;
    r.slope = sh.lambda * sh.w_ax;
    r.log_g_star = std::log(sh.lead) + std::log(sh.g) + r.slope * x;
    r.z = sh.w_ax * (y - x);
    r.below_x = y < x;

    if (r.below_x && opts.below_x == BelowXPolicy::empirical_ratio) {
        if (!plug.pairs) throw EstimationError("psi_hat: empirical ratio needs a sample");
        std::size_t above = 0, both = 0;
        for (const auto& p : *plug.pairs) {
            if (p.x > x) {
                ++above;
                both += p.y > y;
            }
        }
        if (above == 0) throw EstimationError("psi_hat: no observations exceed x for the empirical ratio");
        r.empirical_fallback = true;
        r.unclamped = r.value = static_cast<double>(both) / static_cast<double>(above);
        return r;
    }

    r.unclamped = sh.lead * std::exp(-sh.lambda * r.z) * sh.g;
    r.value = std::clamp(r.unclamped, 0.0, 1.0);
    r.clamped = r.value != r.unclamped;
    return r;
}

PsiResult psi_hat(const SampleSet& s, PsiVariant variant, double x, double y, const FittedModel& fit,
                  const PsiOptions& opts) {
    return psi_hat(fitted_plugin(s, fit), variant, x, y, opts);
}

QuantileResult quantile_hat(const PlugIn& plug, PsiVariant variant, double q, double x) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile_hat: q must lie in (0, 1)");
    check_x(plug, x, "quantile_hat");
    const Shape sh = shape_at(plug, variant, x);
    QuantileResult r;
    r.slope = sh.lambda * sh.w_ax;
    r.log_g_star = std::log(sh.lead) + std::log(sh.g) + r.slope * x;
    if (!std::isfinite(r.log_g_star)) throw EstimationError("quantile_hat: g* is not positive and finite");
    r.value = (r.log_g_star - std::log1p(-q)) / r.slope;
    r.below_x = r.value < x;
    return r;
}

QuantileResult quantile_hat(const SampleSet& s, PsiVariant variant, double q, double x, const FittedModel& fit) {
    return quantile_hat(fitted_plugin(s, fit), variant, q, x);
}

JointHat joint_hat_thm1b(const PlugIn& plug, double x, double z) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("joint_hat_thm1b: x must be finite and > 0");
    if (!std::isfinite(z)) throw DomainError("joint_hat_thm1b: z must be finite");
    const double h = x * plug.w(x);
    if (!(h > 0.0)) throw EstimationError("joint_hat_thm1b: h_hat(x) is not positive");
    const double rho = plug.rho;
    return {std::exp(plug.log_survival(x)) / std::sqrt(2.0 * std::numbers::pi * h) * normal_sf(z),
            x * (rho + z * std::sqrt(1.0 - rho * rho) / std::sqrt(h) + rho / h)};
}

}  // namespace elliptail
