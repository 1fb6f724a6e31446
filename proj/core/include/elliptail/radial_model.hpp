#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "elliptail/quadrature.hpp"

namespace elliptail {

namespace detail {
class RadialFamily;
}

struct KotzParams;
struct TailEquivalentSpec;
struct MixtureParams;
struct CustomModelSpec;

enum class ModelFamily { kotz, tail_equivalent, mixture, custom };

/// Law of the radius R of a spherical pair, with upper endpoint infinity and
/// F(0) = 0, in the Gumbel max-domain of attraction.
///
/// A RadialModel is an immutable handle; copies share the underlying family
/// object, so models are cheap to pass by value and safe to share between
/// threads.
class RadialModel {
public:
    using Parameters = std::variant<KotzParams, TailEquivalentSpec, MixtureParams, CustomModelSpec>;

    explicit RadialModel(std::shared_ptr<const detail::RadialFamily> family);

    /// 1 - F(r); equals 1 for r <= 0.
    double survival(double r) const;
    /// log(1 - F(r)); finite far beyond the point where survival underflows.
    double log_survival(double r) const;
    /// Hazard -d/dr log(1 - F(r)), i.e. the von Mises scaling function of F.
    double hazard(double r) const;
    /// Gumbel MDA scaling function w used by the tail expansions.
    double scaling_w(double r) const;
    /// Factor d(r) in 1 - F = d (1 - F*).
    double von_mises_d(double r) const;
    /// Inverse survival: r with survival(r) = p, for p in (0, 1].
    double quantile(double p) const;
    /// Second-order rate A(u) when the family declares one.
    std::optional<double> second_order_A(double u) const;
    /// Exponent delta when the tail is of Weibull type exp(-c x^delta) up to polynomial factors.
    std::optional<double> weibull_exponent() const;
    /// Radius beyond which the closed-form tail applies (0 when it applies everywhere).
    double validity_radius() const;

    const std::string& label() const;
    ModelFamily family() const;
    Parameters parameters() const;

private:
    std::shared_ptr<const detail::RadialFamily> family_;
};

/// Kotz Type I tail S(x) = C x^N exp(-c x^delta).
struct KotzParams {
    double C = 1.0;
    double N = 0.0;
    double c = 0.5;
    double delta = 2.0;
    /// Radius x0 where the closed form takes over; chosen automatically when empty.
    std::optional<double> validity_radius{};
    /// Constant in A(u) = kappa * u^-delta.
    double kappa = 1.0;
    std::string label{};
};

/// S(x) = (1 + a x^-gamma) S_base(x) on x >= validity radius.
struct TailEquivalentSpec {
    RadialModel base;
    double a = 0.0;
    double gamma = 1.0;
    double tau = 1.0;
    std::optional<double> validity_radius{};
    /// Constant in A_2(u) = kappa * u^-(gamma + min(tau, delta)).
    double kappa = 1.0;
    std::string label{};
};

struct MixtureComponent {
    double weight;
    RadialModel model;
};

struct MixtureParams {
    std::vector<MixtureComponent> components;
    std::string label{};
};

/// User-supplied tail, e.g. a regularly-varying-w von Mises law.
struct CustomModelSpec {
    std::function<double(double)> log_survival;
    std::function<double(double)> scaling_w;
    /// Optional; a central difference of log_survival is used when empty.
    std::function<double(double)> hazard;
    std::function<double(double)> second_order_A;
    std::string label = "custom";
};

RadialModel make_kotz(const KotzParams& params);
RadialModel make_tail_equivalent(const TailEquivalentSpec& spec);
RadialModel make_mixture(const MixtureParams& params);
RadialModel make_custom(CustomModelSpec spec);

/// Kotz(C=1, N=0, c=1/2, delta=2): the chi radius of the standard bivariate normal.
RadialModel make_gaussian_radius();

/// Scaling function w_bar(x) = S(x) / int_x^inf S(s) ds.
double alt_scaling(const RadialModel& model, double x, const QuadratureOptions& opts = {});

/// Radial law together with the pseudo-correlation rho in [0, 1).
class EllipticalPair {
public:
    EllipticalPair(double rho, RadialModel model);

    double rho() const noexcept { return rho_; }
    const RadialModel& model() const noexcept { return model_; }

private:
    double rho_;
    RadialModel model_;
};

namespace detail {

class RadialFamily {
public:
    virtual ~RadialFamily() = default;

    virtual double log_survival(double r) const = 0;
    virtual double hazard(double r) const = 0;
    virtual double scaling_w(double r) const = 0;
    virtual double von_mises_d(double r) const;
    virtual double quantile(double p) const;
    virtual std::optional<double> second_order_A(double u) const = 0;
    virtual std::optional<double> weibull_exponent() const { return std::nullopt; }
    virtual double validity_radius() const { return 0.0; }
    virtual ModelFamily family() const = 0;
    virtual RadialModel::Parameters parameters() const = 0;

    std::string label{};
};

/// Solves log_survival(r) = log_p by bracketed bisection with Newton polish.
double invert_log_survival(const RadialFamily& family, double log_p, double lo = 0.0);

}  // namespace detail

}  // namespace elliptail
