// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "elliptail/asymptotics.hpp"
#include "elliptail/error.hpp"
#include "elliptail/estimators.hpp"
#include "elliptail/exact_tail.hpp"
#include "elliptail/simulation.hpp"
#include "elliptail/tail_geometry.hpp"
#include "oracles.hpp"

using namespace elliptail;

namespace {

// Pinned tolerances.
constexpr double kClosedFormTol = 1e-10;
constexpr double kCrossFormFactor = 10.0;
constexpr double kThm1aBand[] = {0.25, 0.12, 0.07};
constexpr double kThm1bBand[] = {0.2, 0.1};
constexpr double kThm1cBand[] = {0.2, 0.1};
constexpr double kThm3Band = 0.12;
constexpr double kMonteCarloSe = 4.0;
constexpr double kRhoMedian = 0.02;
constexpr double kDeltaMedian = 0.4;
constexpr double kIdentityTol = 1e-12;
constexpr double kRoundTripTol = 1e-12;
constexpr double kGeometryTol = 1e-12;

constexpr double kBudget1 = 1.0;
constexpr double kBudget2 = 10.0;
constexpr double kBudget7 = 30.0;
constexpr double kBudget12 = 1.0;

struct Report {
    int failures = 0;
    void line(int id, bool ok, const std::string& what, const std::string& detail) {
        std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RadialModel gaussian() { return make_gaussian_radius(); }

RadialModel kotz_delta(double delta) {
    KotzParams p;
    p.c = delta == 2.0 ? 0.5 : 1.0;
    p.delta = delta;
    return make_kotz(p);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class F>
void guarded(Report& r, int id, const std::string& what, F body) {
    try {
        body();
    } catch (const std::exception& e) {
        r.line(id, false, what, std::string("exception: ") + e.what());
    }
}

void closed_form(Report& r) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    const EllipticalPair indep(0.0, gaussian());
    for (double x : {0.0, 1.0, 2.0, 3.0})
        worst = std::max(worst, std::fabs(marginal_survival_exact(indep, x).value - oracle::normal_sf(x)));
    for (double x : {0.0, 1.0, 2.0, 3.0})
        for (double y : {0.0, 1.0, 2.0, 3.0}) {
            const double exact = oracle::normal_sf(x) * oracle::normal_sf(y);
            worst = std::max(worst, std::fabs(joint_survival_exact(indep, x, y).value - exact));
        }
    const double dt = seconds_since(t0);
    r.line(1, worst <= kClosedFormTol && dt < kBudget1, "Gaussian closed form",
           "max abs error " + fmt("%.3g", worst) + ", " + fmt("%.3f s", dt));
}

void cross_form(Report& r) {
    const auto t0 = std::chrono::steady_clock::now();
    const QuadratureOptions opts;
    double worst = 0.0;  // in units of the requested tolerance
    int points = 0;
    for (double delta : {1.0, 2.0})
        for (double rho : {0.0, 0.5}) {
            const EllipticalPair p(rho, kotz_delta(delta));
            const std::vector<double> xs{0.5, 1.5, 3.0, 5.0, 8.0};
            // y above rho x, then y below rho x (the latter needs rho > 0; at rho = 0 use y just above 0).
            const std::vector<double> above{rho + 0.1, rho + 0.3, 0.5 * (rho + 1.0), 0.95, 1.0};
            const std::vector<double> below = rho > 0.0 ? std::vector<double>{0.02, 0.1, 0.2, 0.3, 0.45}
                                                        : std::vector<double>{};
            for (const auto* ts : {&above, &below})
                for (double x : xs)
                    for (double t : *ts) {
                        const double a = joint_survival_exact(p, x, t * x, opts).value;
                        const double b = joint_survival_iform(p, x, t * x, opts).value;
                        worst = std::max(worst, std::fabs(a - b) / quadrature_target(opts, a));
                        ++points;
                    }
        }
    const double dt = seconds_since(t0);
    r.line(2, worst <= kCrossFormFactor && dt < kBudget2, "angular and I-form agree",
           std::to_string(points) + " points, max |diff|/tol " + fmt("%.3g", worst) + ", " + fmt("%.2f s", dt));
}

void thm1a(Report& r) {
    bool ok = true;
    std::string detail;
    for (double rho : {0.0, 0.5}) {
        const EllipticalPair p(rho, gaussian());
        double prev = INFINITY;
        int i = 0;
        detail += "rho=" + fmt("%g:", rho);
        for (double x : {4.0, 6.0, 8.0}) {
            const double ratio = thm1a_joint(p, x, x).value / joint_survival_exact(p, x, x).value;
            const double gap = std::fabs(ratio - 1.0);
            ok = ok && gap <= kThm1aBand[i] && gap < prev;
            prev = gap;
            detail += fmt(" %.4f", ratio);
            ++i;
        }
        detail += "; ";
    }
    r.line(3, ok, "thm1a ratios in bands, gaps strictly decreasing", detail);
}

void thm1b(Report& r) {
    const EllipticalPair p(0.5, gaussian());
    bool ok = true;
    std::string detail;
    int i = 0;
    for (double x : {6.0, 10.0}) {
        detail += "x=" + fmt("%g:", x);
        for (double z : {-1.0, 0.0, 1.0}) {
            const TailEstimate e = thm1b_joint(p, x, z);
            const double ratio = e.value / joint_survival_exact(p, x, *e.implied_y).value;
            ok = ok && std::fabs(ratio - 1.0) <= kThm1bBand[i];
            detail += fmt(" %.4f", ratio);
        }
        detail += "; ";
        ++i;
    }
    r.line(4, ok, "thm1b ratios uniformly in z", detail);
}

void thm1c(Report& r) {
    const EllipticalPair p(0.5, gaussian());
    bool ok = true;
    std::string detail;
    int i = 0;
    for (double x : {6.0, 10.0}) {
        const double ratio = thm1c_joint(p, x, 0.3 * x).value / joint_survival_exact(p, x, 0.3 * x).value;
        ok = ok && std::fabs(ratio - 1.0) <= kThm1cBand[i];
        detail += "x=" + fmt("%g:", x) + fmt(" %.4f; ", ratio);
        ++i;
    }
    r.line(5, ok, "thm1c ratios at y = 0.3x", detail);
}

void thm3(Report& r) {
    const EllipticalPair p(0.0, gaussian());
    std::vector<double> ratios;
    std::string detail;
    for (double z : {0.0, 0.5, 1.0}) {
        const TailEstimate e = thm3_shifted(p, 1.0, 8.0, z);
        ratios.push_back(e.value / conditional_survival_exact(p, 8.0, *e.implied_y).value);
        detail += fmt(" %.4f", ratios.back());
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    bool ok = *hi / *lo <= 1.0 + kThm3Band;
    for (double q : ratios) ok = ok && std::fabs(q - 1.0) <= kThm3Band;
    r.line(6, ok, "thm3 shifted ratios at x=8", "ratios" + detail + fmt(", spread %.4f", *hi / *lo - 1.0));
}

void monte_carlo(Report& r) {
    const auto t0 = std::chrono::steady_clock::now();
    const EllipticalPair p(0.5, gaussian());
    const double target = 1e-3;
    // Diagonal threshold with exact joint probability 1e-3.
    double lo = 0.0, hi = 6.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (joint_survival_exact(p, mid, mid).value > target ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    const double exact = joint_survival_exact(p, x, x).value;
    const std::size_t n = 1'000'000;
    const SampleSet s = sample_pairs(p, n, 20261018);
    const double emp = empirical_joint_survival(s, x, x).estimate;
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
    const double dt = seconds_since(t0);
    r.line(7, std::fabs(emp - exact) <= kMonteCarloSe * se && dt < kBudget7, "Monte Carlo joint survival",
           "x=y=" + fmt("%.5f", x) + fmt(", exact %.6g", exact) + fmt(", empirical %.6g", emp) +
               fmt(", |z| %.2f SE", std::fabs(emp - exact) / se) + fmt(", %.2f s", dt));
}

void estimator_recovery(Report& r) {
    const EllipticalPair p(0.5, gaussian());
    const int reps = 20;
    std::vector<double> rho_med, delta_med;
    std::string detail;
    for (std::size_t n : {std::size_t{10'000}, std::size_t{100'000}, std::size_t{1'000'000}}) {
        std::vector<double> er, ed;
        for (int rep = 0; rep < reps; ++rep) {
            const SampleSet s = sample_pairs(p, n, 1000 * n + rep);
            const FittedModel f = fit_scaling(s, default_k_top(n));
            er.push_back(std::fabs(f.rho_hat - 0.5));
            ed.push_back(std::fabs(f.delta_hat - 2.0));
        }
        rho_med.push_back(median(er));
        delta_med.push_back(median(ed));
        detail += "n=" + std::to_string(n) + fmt(": |rho|~%.4f", rho_med.back()) +
                  fmt(" |delta|~%.4f; ", delta_med.back());
    }
    bool ok = rho_med[1] <= kRhoMedian && delta_med[1] <= kDeltaMedian;
    for (std::size_t i = 1; i < rho_med.size(); ++i)
        ok = ok && rho_med[i] <= rho_med[i - 1] && delta_med[i] <= delta_med[i - 1];
    r.line(8, ok, "estimator recovery medians", detail);
}

void plugin_identity(Report& r) {
    const EllipticalPair p(0.5, gaussian());
    const PlugIn plug = oracle_plugin(p);
    const double alpha = directional_constants(0.5, 1.0).alpha;
    double worst = 0.0;
    for (double x : {4.0, 6.0, 8.0})
        for (double z : {0.0, 0.5, 1.0}) {
            const double y = x + z / p.model().scaling_w(alpha * x);
            const double a = psi_hat(plug, PsiVariant::g1, x, y).value;
            const double b = thm3_shifted(p, 1.0, x, z).value;
            worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(b)));
        }
    r.line(9, worst <= kIdentityTol, "oracle plug-in equals shifted form", fmt("max diff %.3g", worst));
}

void quantile_round_trip(Report& r) {
    const EllipticalPair p(0.5, gaussian());
    const SampleSet s = sample_pairs(p, 100'000, 77);
    const FittedModel fit = fit_scaling(s, default_k_top(s.size()));
    const PlugIn fitted = fitted_plugin(s, fit);
    const PlugIn oracle = oracle_plugin(p);
    double worst = 0.0;
    for (const PlugIn* plug : {&fitted, &oracle})
        for (PsiVariant v : {PsiVariant::g1, PsiVariant::g2})
            for (double x : {fit.x_threshold, 1.2 * fit.x_threshold})
                for (double q : {0.5, 0.9, 0.99, 0.999}) {
                    const double y = quantile_hat(*plug, v, q, x).value;
                    worst = std::max(worst, std::fabs(psi_hat(*plug, v, x, y).unclamped - (1.0 - q)));
                }
    r.line(10, worst <= kRoundTripTol, "quantile round trip", fmt("max |psi - (1-q)| %.3g", worst));
}

void ks_identity(Report& r) {
    bool ok = true;
    std::string detail;
    for (const RadialModel& m : {gaussian(), kotz_delta(1.0)}) {
        const EllipticalPair p(0.5, m);
        const std::size_t n = 100'000;
        const SampleSet s = sample_pairs(p, n, 555);
        const SampleSet ref = sample_pairs(p, n, 556);
        std::vector<double> xs;
        xs.reserve(n);
        for (const auto& q : ref.pairs) xs.push_back(q.x);
        const double d = oracle::ks_two_sample(z_transform(s, 1.0, 0.5), xs);
        const double crit = oracle::ks_critical_two_sample(n, n);
        ok = ok && d < crit;
        detail += m.label() + fmt(": D=%.5f", d) + fmt(" (crit %.5f); ", crit);
    }
    r.line(11, ok, "z_transform matches law of X (KS 1%)", detail);
}

void geometry(Report& r) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int bad = 0;
    // The upper bound alpha^2 <= 2/(1+rho) only holds for y >= (2 rho - 1) x; below that
    // line (possible when rho > 1/2) alpha^2 reaches 1/(1-rho^2) as y -> 0.
    int bound_violations = 0, bound_violations_outside_wedge = 0;
    double boundary_worst = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const double rho = 0.99 * U(gen);
        const double x = 0.01 + 50.0 * U(gen);
        const double y = x * (0.001 + 0.999 * U(gen));
        const TailGeometry g = geometry_at(rho, x, y);
        if (!(g.alpha >= 1.0)) ++bad;
        if (g.alpha * g.alpha > 2.0 / (1.0 + rho) * (1.0 + kGeometryTol)) {
            ++bound_violations;
            if (y >= (2.0 * rho - 1.0) * x) ++bound_violations_outside_wedge;
        }
        if (std::fabs(g.beta - g.alpha * x / y) > kGeometryTol * g.beta) ++bad;
        if (std::fabs(y - rho * x) > 1e-6 * x && g.alpha == 1.0) ++bad;
        if (rho > 0.0) {
            const TailGeometry b = geometry_at(rho, x, rho * x);
            boundary_worst = std::max(boundary_worst, std::fabs(b.alpha - 1.0));
        }
    }
    const double dt = seconds_since(t0);
    r.line(12, bad == 0 && bound_violations == 0 && boundary_worst <= kGeometryTol && dt < kBudget12,
           "geometry invariants fuzz",
           std::to_string(bad) + " violations of alpha>=1/beta/equality, " + std::to_string(bound_violations) +
               " of alpha^2<=2/(1+rho) (" + std::to_string(bound_violations_outside_wedge) +
               " with y>=(2rho-1)x), boundary |alpha-1| " + fmt("%.3g", boundary_worst) + fmt(", %.3f s", dt));
}

}  // namespace

int main() {
    Report r;
    guarded(r, 1, "Gaussian closed form", [&] { closed_form(r); });
    guarded(r, 2, "angular and I-form agree", [&] { cross_form(r); });
    guarded(r, 3, "thm1a convergence", [&] { thm1a(r); });
    guarded(r, 4, "thm1b convergence", [&] { thm1b(r); });
    guarded(r, 5, "thm1c regime", [&] { thm1c(r); });
    guarded(r, 6, "thm3 shifted form", [&] { thm3(r); });
    guarded(r, 7, "Monte Carlo joint survival", [&] { monte_carlo(r); });
    guarded(r, 8, "estimator recovery", [&] { estimator_recovery(r); });
    guarded(r, 9, "oracle plug-in identity", [&] { plugin_identity(r); });
    guarded(r, 10, "quantile round trip", [&] { quantile_round_trip(r); });
    guarded(r, 11, "z_transform KS", [&] { ks_identity(r); });
    guarded(r, 12, "geometry invariants", [&] { geometry(r); });
    std::printf("%d of 12 criteria failed\n", r.failures);
    return r.failures == 0 ? 0 : 1;
}
