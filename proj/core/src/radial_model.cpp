#include "elliptail/radial_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "elliptail/error.hpp"

namespace elliptail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw ModelError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Geometric probe grid used by validity checks, [lo, lo * span].
std::vector<double> probe_grid(double lo, double span, int points) {
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double step = std::log(span) / (points - 1);
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    return grid;
}

double log_sum_exp(const std::vector<double>& terms) {
    const double top = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - top);
    return top + std::log(sum);
}

// ---------------------------------------------------------------- Kotz

class KotzFamily final : public detail::RadialFamily {
public:
    explicit KotzFamily(const KotzParams& p) : p_(p) {
        require(finite_positive(p.C), "kotz: C must be finite and > 0");
        require(std::isfinite(p.N), "kotz: N must be finite");
        require(finite_positive(p.c), "kotz: c must be finite and > 0");
        require(finite_positive(p.delta), "kotz: delta must be finite and > 0");
        require(finite_positive(p.kappa), "kotz: kappa must be finite and > 0");
        log_C_ = std::log(p.C);
        label = p.label.empty() ? describe() : p.label;

        if (p.validity_radius) {
            const double x0 = *p.validity_radius;
            require(std::isfinite(x0) && x0 >= 0.0, "kotz: validity_radius must be finite and >= 0");
            if (!try_splice(x0)) {
                std::ostringstream msg;
                msg << "kotz: survival C x^N exp(-c x^delta) exceeds 1 or is not monotone on ["
                    << x0 << ", inf) for " << describe();
                throw ModelError(msg.str());
            }
        } else {
            choose_splice();
        }
        d_anchor_ = p.N == 0.0 ? x0_ : std::max(x0_, 1.0);
        log_d_ = tail_log_survival(d_anchor_);
    }

    double log_survival(double r) const override {
        if (r <= 0.0) return 0.0;
        if (r >= x0_) return tail_log_survival(r);
        const double u = std::pow(r / x0_, p_.delta);
        return u * (bridge_a_ + bridge_b_ * u);
    }

    double hazard(double r) const override {
        if (r <= 0.0) return x0_ == 0.0 ? p_.c * p_.delta * std::pow(0.0, p_.delta - 1.0) : 0.0;
        if (r >= x0_) return p_.c * p_.delta * std::pow(r, p_.delta - 1.0) - p_.N / r;
        const double u = std::pow(r / x0_, p_.delta);
        return -(bridge_a_ + 2.0 * bridge_b_ * u) * p_.delta * u / r;
    }

    double scaling_w(double r) const override { return p_.c * p_.delta * std::pow(r, p_.delta - 1.0); }

    double von_mises_d(double r) const override {
        // 1 - F* = (x / z0)^N exp(-c (x^delta - z0^delta)) on the tail.
        if (r >= x0_ && r > 0.0) return std::exp(log_d_);
        return RadialFamily::von_mises_d(r);
    }

    double quantile(double p) const override {
        if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in (0, 1]");
        if (p == 1.0) return 0.0;
        const double log_p = std::log(p);
        const double log_s0 = x0_ > 0.0 ? tail_log_survival(x0_) : 0.0;
        if (x0_ > 0.0 && log_p >= log_s0) return bridge_quantile(log_p);
        if (p_.N == 0.0) return std::pow((log_C_ - log_p) / p_.c, 1.0 / p_.delta);
        return detail::invert_log_survival(*this, log_p, x0_);
    }

    std::optional<double> second_order_A(double u) const override {
        return p_.kappa * std::pow(u, -p_.delta);
    }
    std::optional<double> weibull_exponent() const override { return p_.delta; }
    double validity_radius() const override { return x0_; }
    ModelFamily family() const override { return ModelFamily::kotz; }
    RadialModel::Parameters parameters() const override {
        KotzParams out = p_;
        out.label = label;
        return out;
    }

private:
    double tail_log_survival(double r) const {
        if (r <= 0.0) return p_.N == 0.0 ? log_C_ : (p_.N > 0.0 ? -kInf : kInf);
        return log_C_ + p_.N * std::log(r) - p_.c * std::pow(r, p_.delta);
    }

    double tail_derivative(double r) const { return p_.N / r - p_.c * p_.delta * std::pow(r, p_.delta - 1.0); }

    // Bridge on [0, x0]: log S = a u + b u^2 with u = (x/x0)^delta, matching
    // value and slope at x0. Monotone iff the slope at both ends is <= 0.
    bool try_splice(double x0) {
        if (x0 == 0.0) {
            if (p_.N != 0.0 || log_C_ != 0.0) return false;
            x0_ = 0.0;
            return tail_is_valid(std::pow(1.0 / p_.c, 1.0 / p_.delta) * 1e-3);
        }
        const double level = tail_log_survival(x0);
        const double slope_u = tail_derivative(x0) * x0 / p_.delta;
        if (!(level <= 0.0) || !(slope_u <= 0.0)) return false;
        const double a = 2.0 * level - slope_u;
        if (a > 0.0) return false;
        if (!tail_is_valid(x0)) return false;
        x0_ = x0;
        bridge_a_ = a;
        bridge_b_ = slope_u - level;
        return true;
    }

    bool tail_is_valid(double from) const {
        for (double r : probe_grid(std::max(from, 1e-300), 1e4, 200)) {
            if (tail_log_survival(r) > 1e-14 || tail_derivative(r) > 0.0) return false;
        }
        return true;
    }

    void choose_splice() {
        if (p_.N == 0.0 && log_C_ == 0.0) {
            x0_ = 0.0;
            return;
        }
        const double scale = std::pow(1.0 / p_.c, 1.0 / p_.delta);
        // Beyond x_mono the closed form is decreasing.
        double start = p_.N > 0.0 ? std::pow(p_.N / (p_.c * p_.delta), 1.0 / p_.delta) : 0.0;
        if (start > 0.0 && tail_log_survival(start) > 0.0) {
            double lo = start;
            double hi = 2.0 * start;
            while (tail_log_survival(hi) > 0.0) hi *= 2.0;
            for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                (tail_log_survival(mid) > 0.0 ? lo : hi) = mid;
            }
            start = hi;
        } else if (p_.N < 0.0) {
            // x^N blows up at 0: find where the tail drops to 1.
            double lo = 1e-12 * scale;
            double hi = scale;
            while (tail_log_survival(hi) > 0.0) hi *= 2.0;
            if (tail_log_survival(lo) > 0.0) {
                for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (tail_log_survival(mid) > 0.0 ? lo : hi) = mid;
                }
                start = hi;
            }
        }
        if (start == 0.0) start = 1e-3 * scale;
        double x0 = start;
        for (int i = 0; i < 400; ++i, x0 *= 1.05) {
            if (try_splice(x0)) return;
        }
        throw ModelError("kotz: could not find a validity radius for " + describe());
    }

    double bridge_quantile(double log_p) const {
        // Unique root in [0, 1] of b u^2 + a u - log_p.
        const double a = bridge_a_;
        const double b = bridge_b_;
        double u;
        if (std::fabs(b) < 1e-300) {
            u = log_p / a;
        } else {
            const double disc = std::max(0.0, a * a + 4.0 * b * log_p);
            const double q = 0.5 * (std::sqrt(disc) - a);  // a <= 0 so q >= 0
            const double r1 = q / b;
            const double r2 = q != 0.0 ? -log_p / q : 0.0;
            auto residual = [&](double v) {
                if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) return kInf;
                return std::fabs(v * (a + b * v) - log_p);
            };
            u = residual(r1) <= residual(r2) ? r1 : r2;
        }
        u = std::clamp(u, 0.0, 1.0);
        return x0_ * std::pow(u, 1.0 / p_.delta);
    }

    std::string describe() const {
        std::ostringstream s;
        s.precision(17);
        s << "kotz(C=" << p_.C << ",N=" << p_.N << ",c=" << p_.c << ",delta=" << p_.delta << ")";
        return s.str();
    }

    KotzParams p_;
    double log_C_ = 0.0;
    double x0_ = 0.0;
    double bridge_a_ = 0.0;
    double bridge_b_ = 0.0;
    double d_anchor_ = 0.0;
    double log_d_ = 0.0;
};

// ---------------------------------------------------------------- tail equivalent

class TailEquivalentFamily final : public detail::RadialFamily {
public:
    explicit TailEquivalentFamily(const TailEquivalentSpec& s) : s_(s), base_(s.base) {
        require(std::isfinite(s.a), "tail_equiv: a must be finite");
        require(finite_positive(s.gamma), "tail_equiv: gamma must be finite and > 0");
        require(finite_positive(s.tau), "tail_equiv: tau must be finite and > 0");
        require(finite_positive(s.kappa), "tail_equiv: kappa must be finite and > 0");
        label = s.label.empty() ? "tail_equiv(" + base_.label() + ")" : s.label;

        if (s.validity_radius) {
            const double xv = *s.validity_radius;
            require(finite_positive(xv), "tail_equiv: validity_radius must be finite and > 0");
            if (!try_radius(xv)) {
                std::ostringstream msg;
                msg << "tail_equiv: (1 + a x^-gamma) S_base(x) exceeds 1, is not positive, or is not "
                       "monotone on ["
                    << xv << ", inf)";
                throw ModelError(msg.str());
            }
        } else {
            double xv = std::max({1.0, base_.validity_radius(), std::pow(2.0 * std::fabs(s.a), 1.0 / s.gamma)});
            bool ok = false;
            for (int i = 0; i < 400 && !ok; ++i, xv *= 1.05) ok = try_radius(xv);
            require(ok, "tail_equiv: no admissible validity radius found");
        }
    }

    double log_survival(double r) const override {
        if (r <= 0.0) return 0.0;
        if (r >= xv_) return std::log1p(s_.a * std::pow(r, -s_.gamma)) + base_.log_survival(r);
        return kappa_ * base_.log_survival(r);
    }

    double hazard(double r) const override {
        if (r <= 0.0) return kappa_ * base_.hazard(r);
        if (r >= xv_) {
            const double t = s_.a * std::pow(r, -s_.gamma);
            return base_.hazard(r) + s_.gamma * t / (r * (1.0 + t));
        }
        return kappa_ * base_.hazard(r);
    }

    double scaling_w(double r) const override { return base_.scaling_w(r); }

    double von_mises_d(double r) const override {
        if (r >= xv_) return base_.von_mises_d(r) * (1.0 + s_.a * std::pow(r, -s_.gamma));
        return RadialFamily::von_mises_d(r);
    }

    std::optional<double> second_order_A(double u) const override {
        const double order = s_.gamma + std::min(s_.tau, base_.weibull_exponent().value_or(s_.tau));
        const double a2 = s_.kappa * std::pow(u, -order);
        auto a1 = base_.second_order_A(u);
        return a1 ? *a1 + a2 : a2;
    }
    std::optional<double> weibull_exponent() const override { return base_.weibull_exponent(); }
    double validity_radius() const override { return xv_; }
    ModelFamily family() const override { return ModelFamily::tail_equivalent; }
    RadialModel::Parameters parameters() const override {
        TailEquivalentSpec out = s_;
        out.label = label;
        return out;
    }

private:
    bool try_radius(double xv) {
        const double base_level = base_.log_survival(xv);
        if (!(base_level < 0.0)) return false;
        for (double r : probe_grid(xv, 1e4, 200)) {
            const double factor = 1.0 + s_.a * std::pow(r, -s_.gamma);
            if (!(factor > 0.0)) return false;
            const double level = std::log(factor) + base_.log_survival(r);
            const double t = s_.a * std::pow(r, -s_.gamma);
            const double haz = base_.hazard(r) + s_.gamma * t / (r * (1.0 + t));
            if (level > 1e-14 || haz < 0.0) return false;
        }
        const double level = std::log1p(s_.a * std::pow(xv, -s_.gamma)) + base_level;
        if (!(level < 0.0)) return false;
        xv_ = xv;
        kappa_ = level / base_level;
        return true;
    }

    TailEquivalentSpec s_;
    RadialModel base_;
    double xv_ = 1.0;
    double kappa_ = 1.0;
};

// ---------------------------------------------------------------- mixture

class MixtureFamily final : public detail::RadialFamily {
public:
    explicit MixtureFamily(const MixtureParams& p) : p_(p) {
        require(!p.components.empty(), "mixture: at least one component required");
        double total = 0.0;
        for (const auto& c : p.components) {
            require(finite_positive(c.weight), "mixture: weights must be finite and > 0");
            total += c.weight;
            log_weights_.push_back(std::log(c.weight));
        }
        if (std::fabs(total - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "mixture: weights sum to " << total << ", expected 1 within 1e-12";
            throw ModelError(msg.str());
        }
        const auto& ref = p.components.front().model;
        for (std::size_t i = 1; i < p.components.size(); ++i) {
            for (double r : probe_grid(0.25, 4096.0, 61)) {
                const double w0 = ref.scaling_w(r);
                const double wi = p.components[i].model.scaling_w(r);
                if (std::fabs(wi - w0) > 1e-10 * std::max(std::fabs(w0), 1e-300)) {
                    std::ostringstream msg;
                    msg << "mixture: component " << i << " scaling function differs from component 0 at r=" << r;
                    throw ModelError(msg.str());
                }
            }
        }
        std::string joined;
        for (const auto& c : p.components) joined += (joined.empty() ? "" : "+") + c.model.label();
        label = p.label.empty() ? "mixture(" + joined + ")" : p.label;
    }

    double log_survival(double r) const override {
        if (r <= 0.0) return 0.0;
        std::vector<double> terms;
        terms.reserve(p_.components.size());
        for (std::size_t i = 0; i < p_.components.size(); ++i)
            terms.push_back(log_weights_[i] + p_.components[i].model.log_survival(r));
        return std::min(0.0, log_sum_exp(terms));
    }

    double hazard(double r) const override {
        std::vector<double> terms;
        for (std::size_t i = 0; i < p_.components.size(); ++i)
            terms.push_back(log_weights_[i] + p_.components[i].model.log_survival(r));
        const double total = log_sum_exp(terms);
        double h = 0.0;
        for (std::size_t i = 0; i < p_.components.size(); ++i)
            h += std::exp(terms[i] - total) * p_.components[i].model.hazard(r);
        return h;
    }

    double scaling_w(double r) const override { return p_.components.front().model.scaling_w(r); }

    std::optional<double> second_order_A(double u) const override {
        double sum = 0.0;
        for (const auto& c : p_.components) {
            auto a = c.model.second_order_A(u);
            if (!a) return std::nullopt;
            sum += *a;
        }
        return sum;
    }

    std::optional<double> weibull_exponent() const override {
        auto first = p_.components.front().model.weibull_exponent();
        for (const auto& c : p_.components)
            if (c.model.weibull_exponent() != first) return std::nullopt;
        return first;
    }

    double validity_radius() const override {
        double r = 0.0;
        for (const auto& c : p_.components) r = std::max(r, c.model.validity_radius());
        return r;
    }
    ModelFamily family() const override { return ModelFamily::mixture; }
    RadialModel::Parameters parameters() const override {
        MixtureParams out = p_;
        out.label = label;
        return out;
    }

private:
    MixtureParams p_;
    std::vector<double> log_weights_;
};

// ---------------------------------------------------------------- custom

class CustomFamily final : public detail::RadialFamily {
public:
    explicit CustomFamily(CustomModelSpec s) : s_(std::move(s)) {
        require(static_cast<bool>(s_.log_survival), "custom: log_survival is required");
        require(static_cast<bool>(s_.scaling_w), "custom: scaling_w is required");
        label = s_.label;
    }

    double log_survival(double r) const override { return r <= 0.0 ? 0.0 : std::min(0.0, s_.log_survival(r)); }

    double hazard(double r) const override {
        if (s_.hazard) return s_.hazard(r);
        const double h = 1e-6 * std::max(r, 1e-3);
        return -(log_survival(r + h) - log_survival(std::max(r - h, 0.0))) / (r + h - std::max(r - h, 0.0));
    }

    double scaling_w(double r) const override { return s_.scaling_w(r); }

    std::optional<double> second_order_A(double u) const override {
        if (!s_.second_order_A) return std::nullopt;
        return s_.second_order_A(u);
    }
    ModelFamily family() const override { return ModelFamily::custom; }
    RadialModel::Parameters parameters() const override { return s_; }

private:
    CustomModelSpec s_;
};

}  // namespace

// ---------------------------------------------------------------- RadialFamily defaults

namespace detail {

double RadialFamily::von_mises_d(double r) const {
    // d = S(r) / S*(r), S*(r) = exp(-int_1^r w).
    QuadratureOptions opts;
    opts.abs_tol = kInf;
    opts.rel_tol = 1e-12;
    auto w = [this](double s) { return scaling_w(s); };
    const double integral = r >= 1.0 ? integrate(w, 1.0, r, opts).value : -integrate(w, r, 1.0, opts).value;
    return std::exp(log_survival(r) + integral);
}

double RadialFamily::quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in (0, 1]");
    if (p == 1.0) return 0.0;
    return invert_log_survival(*this, std::log(p));
}

double invert_log_survival(const RadialFamily& family, double log_p, double lo) {
    // log S is nonincreasing: bracket [lo, hi] with log S(lo) >= log_p > log S(hi).
    if (family.log_survival(lo) < log_p) lo = 0.0;
    double hi = std::max(2.0 * lo, 1.0);
    for (int i = 0; family.log_survival(hi) >= log_p; ++i) {
        if (i > 2000) throw ModelError("quantile: survival does not decay below the requested level");
        lo = hi;
        hi *= 2.0;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 400; ++i) {
        const double g = family.log_survival(x) - log_p;
        if (g > 0.0) lo = x; else hi = x;
        if (g == 0.0) return x;
        const double h = family.hazard(x);
        double next = h > 0.0 ? x + g / h : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-14 * std::fabs(x) || hi - lo <= 1e-15 * hi) return next;
        x = next;
    }
    return x;
}

}  // namespace detail

// ---------------------------------------------------------------- RadialModel

RadialModel::RadialModel(std::shared_ptr<const detail::RadialFamily> family) : family_(std::move(family)) {
    if (!family_) throw ModelError("RadialModel: null family");
}

double RadialModel::survival(double r) const { return r <= 0.0 ? 1.0 : std::exp(family_->log_survival(r)); }
double RadialModel::log_survival(double r) const { return family_->log_survival(r); }
double RadialModel::hazard(double r) const { return family_->hazard(r); }
double RadialModel::scaling_w(double r) const { return family_->scaling_w(r); }
double RadialModel::von_mises_d(double r) const { return family_->von_mises_d(r); }
double RadialModel::quantile(double p) const { return family_->quantile(p); }
std::optional<double> RadialModel::second_order_A(double u) const { return family_->second_order_A(u); }
std::optional<double> RadialModel::weibull_exponent() const { return family_->weibull_exponent(); }
double RadialModel::validity_radius() const { return family_->validity_radius(); }
const std::string& RadialModel::label() const { return family_->label; }
ModelFamily RadialModel::family() const { return family_->family(); }
RadialModel::Parameters RadialModel::parameters() const { return family_->parameters(); }

RadialModel make_kotz(const KotzParams& params) { return RadialModel(std::make_shared<KotzFamily>(params)); }

RadialModel make_tail_equivalent(const TailEquivalentSpec& spec) {
    return RadialModel(std::make_shared<TailEquivalentFamily>(spec));
}

RadialModel make_mixture(const MixtureParams& params) { return RadialModel(std::make_shared<MixtureFamily>(params)); }

RadialModel make_custom(CustomModelSpec spec) { return RadialModel(std::make_shared<CustomFamily>(std::move(spec))); }

RadialModel make_gaussian_radius() {
    KotzParams p;
    p.label = "gaussian";
    return make_kotz(p);
}

double alt_scaling(const RadialModel& model, double x, const QuadratureOptions& opts) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("alt_scaling: x must be finite and > 0");
    const double level = model.log_survival(x);
    if (!std::isfinite(level)) throw DomainError("alt_scaling: survival vanishes at x");
    // Rescale so that the integrand decays on a unit scale: s = x + u / w(x).
    const double scale = model.scaling_w(x);
    if (!(scale > 0.0)) throw DomainError("alt_scaling: scaling function must be positive at x");
    QuadratureOptions o = opts;
    o.abs_tol = kInf;
    auto ratio = [&](double u) { return std::exp(model.log_survival(x + u / scale) - level); };
    const QuadratureResult tail = integrate_to_infinity(ratio, 0.0, o);
    if (!(tail.value > 0.0)) throw QuadratureError("alt_scaling: tail integral is not positive", tail.value,
                                                   tail.abs_error_estimate);
    return scale / tail.value;
}

EllipticalPair::EllipticalPair(double rho, RadialModel model) : rho_(rho), model_(std::move(model)) {
    if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("EllipticalPair: rho must lie in [0, 1)");
}

}  // namespace elliptail
