#pragma once

#include "elliptail/quadrature.hpp"
#include "elliptail/radial_model.hpp"

namespace elliptail {

/// I(a, x) = int_a^inf S(x s) / (s sqrt(s^2 - 1)) ds, evaluated through
/// s = 1 / cos(theta) as int_{arccos(1/a)}^{pi/2} S(x / cos theta) dtheta.
QuadratureResult integral_I(double a, double x, const RadialModel& model, const QuadratureOptions& opts = {});

/// Same integral through s = cosh(t): int_{acosh a}^inf S(x cosh t) / cosh t dt.
/// Independent second evaluator used to cross-check the angular route.
QuadratureResult integral_I_hyperbolic(double a, double x, const RadialModel& model,
                                       const QuadratureOptions& opts = {});

/// P(X > x, Y > y) for x, y >= 0 from the angular representation
///   2 pi P = int_{theta1}^{pi/2} S(x / cos t) dt + int_{psi - pi/2}^{theta1} S(y / cos(t - psi)) dt,
/// theta1 = arctan((y/x - rho) / sqrt(1 - rho^2)), psi = arccos(rho). Pairs with
/// y > x are evaluated as (y, x) by exchangeability.
///
/// With `cross_validate`, the result is compared with joint_survival_iform
/// (when y > 0 and y != rho x) and a QuadratureError raised if they disagree
/// by more than 10 times the requested tolerance.
QuadratureResult joint_survival_exact(const EllipticalPair& pair, double x, double y,
                                      const QuadratureOptions& opts = {}, bool cross_validate = false);

/// P(X > x, Y > y) from the I-integral identities:
///   y in (rho x, x]:  [I(alpha, x) + I(beta, y)] / (2 pi)
///   y < rho x:        [2 I(1, x) - I(alpha, x) + I(beta, y)] / (2 pi)
/// Requires x > 0, y > 0 and y != rho x.
QuadratureResult joint_survival_iform(const EllipticalPair& pair, double x, double y,
                                      const QuadratureOptions& opts = {});

/// P(X > x) = I(1, x) / pi; negative x handled by symmetry of X about 0.
QuadratureResult marginal_survival_exact(const EllipticalPair& pair, double x, const QuadratureOptions& opts = {});

/// P(Y > y | X > x) = joint / marginal, with propagated error estimate.
QuadratureResult conditional_survival_exact(const EllipticalPair& pair, double x, double y,
                                            const QuadratureOptions& opts = {});

}  // namespace elliptail
