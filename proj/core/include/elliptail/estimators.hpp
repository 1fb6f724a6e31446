#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "elliptail/quadrature.hpp"
#include "elliptail/radial_model.hpp"
#include "elliptail/simulation.hpp"

namespace elliptail {

/// Sample on which the scaling function is fitted.
///   R: radius reconstructed from (X, Y) and rho_hat (default);
///   X: first coordinates;
///   Z: z_transform(zeta, rho_hat), equal in law to X.
struct Channel {
    enum class Kind { R, X, Z };
    Kind kind = Kind::R;
    double zeta = 1.0;

    static Channel radius() { return {Kind::R, 1.0}; }
    static Channel first_coordinate() { return {Kind::X, 1.0}; }
    static Channel z(double zeta) { return {Kind::Z, zeta}; }
};

std::string to_string(const Channel& channel);
/// "R", "X" or "Z" (zeta supplied separately).
Channel parse_channel(const std::string& text, double zeta = 1.0);

/// Power-form scaling function w(x) = c delta x^(delta - 1) fitted to a sample.
struct FittedModel {
    double rho_hat = 0.0;
    double c_hat = 0.0;
    double delta_hat = 0.0;
    std::size_t k_top = 0;
    std::size_t n = 0;
    Channel channel;
    /// Root mean square residual of the log-log regression.
    double residual = 0.0;
    /// Smallest order statistic of the channel used by the fit.
    double fit_threshold = 0.0;
    /// k_top-th largest X coordinate; psi_hat requires x at or above it.
    double x_threshold = 0.0;

    double w(double x) const;
    /// Fitted log tail -c_hat x^delta_hat.
    double log_tail(double x) const;
};

/// Pearson correlation of the pairs. Requires n >= 10 and nonzero variances.
double estimate_rho(const SampleSet& s);

/// ceil(2 sqrt(n)) clamped to [30, n/2].
std::size_t default_k_top(std::size_t n);

/// Least squares of log(-log S_n(v_(i))) on log v_(i) over the top k_top order
/// statistics v_(1) >= ... >= v_(k) of the channel, with S_n(v_(i)) = i/(n+1).
/// Slope is delta_hat, intercept log c_hat. Requires k_top in [30, n/2].
FittedModel fit_scaling(const SampleSet& s, std::size_t k_top, const Channel& channel = {});

/// Tail ingredients of the plug-in estimators: the correlation, the scaling
/// function, the radial log tail (for g1) and the marginal survival of X
/// (for g2). Built either from a fit or from a known model.
struct PlugIn {
    /// Correlation entering the a = 1 constants (clamped at 0).
    double rho = 0.0;
    bool rho_clamped = false;
    std::function<double(double)> w;
    std::function<double(double)> log_survival;
    std::function<double(double)> marginal_x;
    /// psi_hat rejects x below this value.
    double x_threshold = 0.0;
    /// Marginal survival switches from empirical to fitted above this point.
    std::optional<double> splice_point;
    /// Sorted X coordinates and pairs, for the empirical parts. Empty for oracle plug-ins.
    std::shared_ptr<const std::vector<double>> sorted_x;
    std::shared_ptr<const std::vector<Pair>> pairs;
    std::string source;
};

/// Plug-in from a fitted model. Variant 2's marginal uses the empirical
/// survival of X where at least 10 exceedances exist and the fitted tail
/// beyond (radial quadrature for the R channel, exp(-c x^delta) otherwise).
PlugIn fitted_plugin(const SampleSet& s, const FittedModel& fit);

/// Plug-in with the true correlation, w, radial tail and quadrature marginal.
PlugIn oracle_plugin(const EllipticalPair& pair, const QuadratureOptions& opts = {});

enum class PsiVariant { g1 = 1, g2 = 2 };
PsiVariant parse_variant(int v);

/// Handling of y < x, where the shifted form has z < 0.
enum class BelowXPolicy {
    /// Evaluate the exponential form anyway and flag it.
    extrapolate,
    /// Use the empirical ratio #{X > x, Y > y} / #{X > x} and flag it.
    empirical_ratio,
};

struct PsiOptions {
    BelowXPolicy below_x = BelowXPolicy::extrapolate;
};

struct PsiResult {
    /// Estimate of P(Y > y | X > x), clamped to [0, 1].
    double value = 0.0;
    double unclamped = 0.0;
    bool clamped = false;
    bool below_x = false;
    bool empirical_fallback = false;
    /// w_hat(alpha_hat x) (y - x).
    double z = 0.0;
    /// g_hat_1 or g_hat_2 at (alpha_hat, x).
    double g = 0.0;
    /// log g*, where Psi = exp(-lambda_hat w_hat(alpha_hat x) y) g*.
    double log_g_star = 0.0;
    /// lambda_hat w_hat(alpha_hat x).
    double slope = 0.0;
};

PsiResult psi_hat(const PlugIn& plug, PsiVariant variant, double x, double y, const PsiOptions& opts = {});
PsiResult psi_hat(const SampleSet& s, PsiVariant variant, double x, double y, const FittedModel& fit,
                  const PsiOptions& opts = {});

struct QuantileResult {
    double value = 0.0;
    /// The quantile fell below x (extrapolated shifted form).
    bool below_x = false;
    double log_g_star = 0.0;
    double slope = 0.0;
};

/// y_hat = (log g* - log(1 - q)) / (lambda_hat w_hat(alpha_hat x)), the exact
/// inverse of psi_hat in y.
QuantileResult quantile_hat(const PlugIn& plug, PsiVariant variant, double q, double x);
QuantileResult quantile_hat(const SampleSet& s, PsiVariant variant, double q, double x, const FittedModel& fit);

struct JointHat {
    double value;
    double implied_y;
};

/// Plug-in of the near-diagonal joint tail: S_hat(x) / sqrt(2 pi h_hat) (1 - Phi(z)),
/// h_hat = x w_hat(x), at y = x [rho + z sqrt(1 - rho^2) / sqrt(h_hat) + rho / h_hat].
JointHat joint_hat_thm1b(const PlugIn& plug, double x, double z);

}  // namespace elliptail
