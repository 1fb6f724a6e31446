#pragma once

// Adaptive Gauss-Kronrod (10/21) quadrature with combined absolute and
// relative tolerance, an evaluation budget, and per-call evaluation counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "elliptail/error.hpp"

namespace elliptail {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    /// Relative tolerance; set to infinity for a purely absolute criterion.
    double rel_tol = 1e-10;
    std::size_t max_evaluations = 1'000'000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;

    QuadratureResult& operator+=(const QuadratureResult& other) {
        value += other.value;
        abs_error_estimate += other.abs_error_estimate;
        evaluations += other.evaluations;
        return *this;
    }
};

/// Error target for a running estimate: err must not exceed either tolerance.
inline double quadrature_target(const QuadratureOptions& opts, double value) {
    return std::min(opts.abs_tol, opts.rel_tol * std::fabs(value));
}

namespace detail {

inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes 1,3,5,7,9.
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod21(F& f, double lo, double hi) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<double, 21> fv{};
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[10];
    double gauss = 0.0;
    double abs_sum = std::fabs(kronrod);
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += kKronrodWeights[j] * (f1 + f2);
        abs_sum += kKronrodWeights[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[10] * std::fabs(fc - mean);
    for (std::size_t j = 0; j < 10; ++j) {
        asc += kKronrodWeights[j] * (std::fabs(fv[2 * j] - mean) + std::fabs(fv[2 * j + 1] - mean));
    }

    const double scale = std::fabs(half);
    const double result = kronrod * half;
    abs_sum *= scale;
    asc *= scale;
    double err = std::fabs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    if (abs_sum > tiny / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
    return {lo, hi, result, err};
}

}  // namespace detail

/// Integrates f over [points.front(), points.back()], starting from one
/// panel per consecutive pair of breakpoints (which must be nondecreasing).
///
/// Panels are bisected in order of decreasing error until the summed error
/// estimate is at most min(abs_tol, rel_tol * |value|). Throws QuadratureError
/// when the budget is exhausted or roundoff prevents further refinement.
template <class F>
QuadratureResult integrate_partitioned(F&& f, std::span<const double> points, const QuadratureOptions& opts = {}) {
    if (points.size() < 2) throw DomainError("integrate: need at least two breakpoints");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) throw DomainError("integrate: non-finite integration limits");
        if (i > 0 && points[i] < points[i - 1]) throw DomainError("integrate: breakpoints must be nondecreasing");
    }
    const double lo = points.front();
    const double hi = points.back();

    std::size_t evaluations = 0;
    auto counted = [&](double t) {
        ++evaluations;
        return static_cast<double>(f(t));
    };

    std::priority_queue<detail::Panel> panels;
    std::vector<detail::Panel> settled;  // too narrow to bisect further
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i] == points[i - 1]) continue;
        detail::Panel p = detail::gauss_kronrod21(counted, points[i - 1], points[i]);
        total += p.value;
        total_err += p.error;
        panels.push(p);
    }

    auto finish = [&]() {
        // Fresh summation to avoid drift from the running totals.
        std::vector<detail::Panel> all = std::move(settled);
        while (!panels.empty()) {
            all.push_back(panels.top());
            panels.pop();
        }
        std::sort(all.begin(), all.end(),
                  [](const detail::Panel& a, const detail::Panel& b) { return std::fabs(a.value) < std::fabs(b.value); });
        double value = 0.0;
        double err = 0.0;
        for (const auto& p : all) {
            value += p.value;
            err += p.error;
        }
        return QuadratureResult{value, err, evaluations};
    };

    while (total_err > quadrature_target(opts, total)) {
        if (panels.empty()) {
            auto partial = finish();
            std::ostringstream msg;
            msg << "integrate: roundoff limits accuracy on [" << lo << ", " << hi
                << "], error estimate " << partial.abs_error_estimate;
            throw QuadratureError(msg.str(), partial.value, partial.abs_error_estimate);
        }
        if (evaluations + 42 > opts.max_evaluations) {
            auto partial = finish();
            std::ostringstream msg;
            msg << "integrate: evaluation budget " << opts.max_evaluations << " exhausted on [" << lo
                << ", " << hi << "], error estimate " << partial.abs_error_estimate;
            throw QuadratureError(msg.str(), partial.value, partial.abs_error_estimate);
        }
        detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const double width = worst.hi - worst.lo;
        if (width <= 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(mid))) {
            settled.push_back(worst);
            continue;
        }
        detail::Panel left = detail::gauss_kronrod21(counted, worst.lo, mid);
        detail::Panel right = detail::gauss_kronrod21(counted, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    return finish();
}

/// Integrates f over the finite interval [lo, hi]; hi < lo negates the result.
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
    if (hi < lo) {
        QuadratureResult r = integrate(f, hi, lo, opts);
        r.value = -r.value;
        return r;
    }
    const std::array<double, 2> points{lo, hi};
    return integrate_partitioned(f, std::span<const double>(points), opts);
}

/// Breakpoints lo < ... < hi refined geometrically toward one end, for
/// integrands sharply concentrated at that end.
inline std::vector<double> geometric_breakpoints(double lo, double hi, bool toward_lo, int levels = 24) {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(levels) + 2);
    const double width = hi - lo;
    if (toward_lo) {
        pts.push_back(lo);
        for (int k = levels; k >= 1; --k) pts.push_back(lo + std::ldexp(width, -k));
        pts.push_back(hi);
    } else {
        pts.push_back(lo);
        for (int k = 1; k <= levels; ++k) pts.push_back(hi - std::ldexp(width, -k));
        pts.push_back(hi);
        std::sort(pts.begin(), pts.end());
    }
    return pts;
}

/// Integrates f over [lo, inf) through the map s = lo + t / (1 - t).
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double lo, const QuadratureOptions& opts = {}) {
    auto mapped = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double one_minus = 1.0 - t;
        const double s = lo + t / one_minus;
        const double v = f(s);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace elliptail
