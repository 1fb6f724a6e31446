#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elliptail/quadrature.hpp"
#include "elliptail/radial_model.hpp"

namespace elliptail {

enum class Regime { thm1a, thm1b, thm1c, thm2, thm3, marginal };

std::string_view to_string(Regime regime);
/// Parses "1a", "1b", "1c", "2", "3", "marginal" (and the "thm" prefixed names).
Regime parse_regime(std::string_view text);

/// One dropped O(.) term, e.g. {"A(alpha x)", 0.0156}.
struct CorrectionTerm {
    std::string label;
    double magnitude;
};

/// Leading-order value of a tail expansion plus the magnitudes of the
/// correction terms it drops.
struct TailEstimate {
    double value = 0.0;
    std::vector<CorrectionTerm> correction_terms;
    Regime regime = Regime::marginal;
    /// Threshold y implied by the (x, z) parameterisation (thm1b, thm3 shifted).
    std::optional<double> implied_y;
    /// Second evaluation of the same quantity (thm3: the g2 route).
    std::optional<double> alternate_value;
};

/// Acceptance margins separating the regimes 1a, 1b and 1c.
struct RegimeMargins {
    /// thm1a requires alpha >= 1 + alpha_margin.
    double alpha_margin = 0.05;
    /// thm1c requires y/x <= rho - ratio_margin.
    double ratio_margin = 0.05;
    /// thm1b covers |y/x - rho| <= strip_width * sqrt(1 - rho^2).
    double strip_width = 0.05;
    /// Bound on |z| for thm1b.
    double z_bound = 10.0;
};

/// h(x) = x w(x).
double h_of(const RadialModel& model, double x);

/// P(X > x, Y > y) ~ alpha K / (2 pi) * S(alpha x) / (x w(alpha x)), y in (rho x, x].
TailEstimate thm1a_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins = {});

/// P(X > x, Y > y) ~ S(x) / sqrt(2 pi h(x)) * (1 - Phi(z)) at
/// y = x [rho + z sqrt(1 - rho^2) / sqrt(h(x)) + rho / h(x)].
TailEstimate thm1b_joint(const EllipticalPair& pair, double x, double z, const RegimeMargins& margins = {});

/// z such that thm1b's implied threshold equals y.
double thm1b_z_for(const EllipticalPair& pair, double x, double y);

/// P(X > x, Y > y) ~ S(x) / sqrt(2 pi h(x)) for y < a x, a < rho.
TailEstimate thm1c_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins = {});

enum class MarginalPlugIn { exact, expansion };

/// P(X > x, Y > y) ~ alpha^{3/2} K / sqrt(2 pi x w(alpha x)) * P(X > alpha x).
/// The marginal is the quadrature value by default; `expansion` substitutes
/// its own leading term, which reproduces thm1a exactly.
TailEstimate thm2_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins = {},
                        MarginalPlugIn marginal = MarginalPlugIn::exact, const QuadratureOptions& opts = {});

/// P(X > x) ~ S(x) / sqrt(2 pi h(x)).
TailEstimate marginal_berman(const EllipticalPair& pair, double x);

/// P(Y > y | X > x) ~ alpha^{3/2} K / sqrt(2 pi) * g(alpha, x); `value` uses
/// g1 = sqrt(w(x)/(alpha x)) / w(alpha x) * S(alpha x) / S(x) and
/// `alternate_value` uses g2 = P(X > alpha x) / (sqrt(x w(alpha x)) P(X > x))
/// with quadrature marginals.
TailEstimate thm3_conditional(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins = {},
                              const QuadratureOptions& opts = {});

/// P(Y > a x + z / w(alpha_a x) | X > x) ~ alpha_a^{3/2} K_a / sqrt(2 pi) exp(-lambda_a z) g(alpha_a, x).
TailEstimate thm3_shifted(const EllipticalPair& pair, double a, double x, double z,
                          const QuadratureOptions& opts = {});

/// Leading term of I(a, x) for a > 1: S(a x) / (a sqrt(a^2 - 1) x w(a x)).
double integral_I_leading(double a, double x, const RadialModel& model);

/// Leading term of I(1 + z/h(x), x) for z >= 0: S(x) / sqrt(h(x)) sqrt(2 pi) (1 - Phi(sqrt(2 z))).
double integral_I_near_one_leading(double z, double x, const RadialModel& model);

/// Result of automatic regime selection.
struct RegimeChoice {
    /// Regime whose hypothesis covers the point, or the nearer one on a boundary.
    Regime regime;
    bool boundary = false;
    /// y/x after ordering so that y <= x.
    double ratio;
};

/// Classifies (x, y) into thm1a / thm1b / thm1c (exchanging x and y when y > x).
RegimeChoice classify_regime(double rho, double x, double y, const RegimeMargins& margins = {});

/// Evaluates the thm1 expansion selected by classify_regime. Boundary
/// points are evaluated in both neighbouring regimes with the margins
/// relaxed; the other value is returned in `alternate_value`.
struct AutoEstimate {
    TailEstimate estimate;
    bool boundary = false;
    std::optional<Regime> alternate_regime;
};
AutoEstimate auto_joint(const EllipticalPair& pair, double x, double y, const RegimeMargins& margins = {});

}  // namespace elliptail
