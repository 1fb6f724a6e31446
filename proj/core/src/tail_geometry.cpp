#include "elliptail/tail_geometry.hpp"

#include <cmath>
#include <sstream>

#include "elliptail/error.hpp"

namespace elliptail {

namespace {

void check_rho(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
}

}  // namespace

TailGeometry geometry_at(double rho, double x, double y) {
    check_rho(rho);
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError("geometry_at: x and y must be finite and > 0");
    const double one_minus = 1.0 - rho * rho;
    const double offset = y / x - rho;
    const double alpha = std::sqrt(1.0 + offset * offset / one_minus);

    TailGeometry g{alpha, alpha * x / y, std::nullopt, std::acos(rho)};
    const double denom = (x - rho * y) * (y - rho * x);
    if (x - rho * y > 0.0 && y - rho * x > 0.0) g.K = x * x * one_minus * std::sqrt(one_minus) / denom;
    return g;
}

double geometry_K(double rho, double x, double y) {
    const TailGeometry g = geometry_at(rho, x, y);
    if (!g.K) {
        std::ostringstream msg;
        msg << "K undefined: requires rho*x < y < x/rho (rho=" << rho << ", x=" << x << ", y=" << y << ")";
        throw DomainError(msg.str());
    }
    return *g.K;
}

DirectionalConstants directional_constants(double rho, double a) {
    check_rho(rho);
    if (!(a > rho && a <= 1.0)) throw DomainError("directional_constants: a must lie in (rho, 1]");
    const double one_minus = 1.0 - rho * rho;
    const double spread = 1.0 - 2.0 * a * rho + a * a;
    return {std::sqrt(spread / one_minus),
            one_minus * std::sqrt(one_minus) / ((1.0 - a * rho) * (a - rho)),
            (a - rho) / std::sqrt(one_minus * spread)};
}

}  // namespace elliptail
