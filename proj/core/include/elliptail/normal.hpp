#pragma once

#include <cmath>
#include <numbers>

namespace elliptail {

/// Standard normal distribution function.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Standard normal survival 1 - Phi(z), accurate in the far upper tail.
inline double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace elliptail
