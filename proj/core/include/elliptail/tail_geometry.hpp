#pragma once

#include <optional>

namespace elliptail {

/// Geometry constants of the joint tail at a query point (x, y).
struct TailGeometry {
    /// sqrt(1 + (y/x - rho)^2 / (1 - rho^2)); the dominant radial multiplier.
    double alpha;
    /// alpha * x / y.
    double beta;
    /// x^2 (1-rho^2)^{3/2} / ((x - rho y)(y - rho x)); empty when the denominator is not positive.
    std::optional<double> K;
    /// arccos(rho).
    double psi;
};

/// Constants along the ray y = a x.
struct DirectionalConstants {
    double alpha;
    double K;
    double lambda;
};

TailGeometry geometry_at(double rho, double x, double y);

/// Like geometry_at(...).K but raises DomainError ("K undefined") instead of returning empty.
double geometry_K(double rho, double x, double y);

/// Requires a in (rho, 1].
DirectionalConstants directional_constants(double rho, double a);

}  // namespace elliptail
