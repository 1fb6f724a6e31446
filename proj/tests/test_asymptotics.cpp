#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "elliptail/asymptotics.hpp"
#include "elliptail/error.hpp"
#include "elliptail/exact_tail.hpp"
#include "elliptail/tail_geometry.hpp"
#include "oracles.hpp"

using namespace elliptail;

namespace {

constexpr double kPi = std::numbers::pi;

const EllipticalPair& gauss0() {
    static const EllipticalPair p(0.0, make_gaussian_radius());
    return p;
}
const EllipticalPair& gauss5() {
    static const EllipticalPair p(0.5, make_gaussian_radius());
    return p;
}

double ratio_1a(const EllipticalPair& p, double x, double y) {
    return thm1a_joint(p, x, y).value / joint_survival_exact(p, x, y).value;
}

}  // namespace

TEST(Thm1a, GaussianClosedForm) {
    const auto e = thm1a_joint(gauss0(), 3.0, 3.0);
    EXPECT_NEAR(e.value / (std::exp(-9.0) / (18.0 * kPi)), 1.0, 1e-13);
    EXPECT_EQ(e.regime, Regime::thm1a);
    ASSERT_EQ(e.correction_terms.size(), 2u);
    const double ax = std::sqrt(2.0) * 3.0;
    EXPECT_NEAR(e.correction_terms[0].magnitude, std::pow(ax, -2.0), 1e-15);
    EXPECT_NEAR(e.correction_terms[1].magnitude, 1.0 / (3.0 * ax), 1e-15);
}

TEST(Thm1a, RatioTendsToOne) {
    double prev = INFINITY;
    for (double x : {4.0, 6.0, 8.0}) {
        const double gap = std::fabs(ratio_1a(gauss0(), x, x) - 1.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(Thm1a, ScalingOnlyMovesTheRadialArguments) {
    const auto g = geometry_at(0.5, 3.0, 2.5);
    const RadialModel& m = gauss5().model();
    for (double t : {1.0, 2.0}) {
        const double x = 3.0 * t, ax = g.alpha * x;
        EXPECT_NEAR(thm1a_joint(gauss5(), x, 2.5 * t).value / (g.alpha * *g.K / (2 * kPi) * m.survival(ax) / (x * ax)), 1.0,
                    1e-13);
    }
}

TEST(Thm1a, RegimeViolationsSuggestAlternatives) {
    try {
        thm1a_joint(gauss5(), 4.0, 1.0);
        FAIL();
    } catch (const RegimeError& e) {
        EXPECT_EQ(e.suggested(), "1c");
    }
    try {
        thm1a_joint(gauss5(), 4.0, 2.05);
        FAIL();
    } catch (const RegimeError& e) {
        EXPECT_EQ(e.suggested(), "1b");
    }
    try {
        thm1a_joint(gauss5(), 4.0, 5.0);
        FAIL();
    } catch (const RegimeError& e) {
        EXPECT_EQ(e.suggested(), "swap");
    }
    EXPECT_THROW(thm1a_joint(gauss5(), -1.0, 1.0), DomainError);
}

TEST(Thm1b, SpecExamples) {
    const RadialModel& m = gauss0().model();
    const double x = 6.0, h = h_of(m, x);
    EXPECT_NEAR(thm1b_joint(gauss0(), x, 0.0).value, m.survival(x) / (2.0 * std::sqrt(2 * kPi * h)), 1e-30);
    EXPECT_LE(thm1b_joint(gauss0(), x, 8.0).value, 1e-15 * m.survival(x) / std::sqrt(h));

    const auto e = thm1b_joint(gauss0(), 6.0, 1.0);
    ASSERT_TRUE(e.implied_y);
    EXPECT_NEAR(e.value / joint_survival_exact(gauss0(), 6.0, *e.implied_y).value, 1.0, 0.15);
}

TEST(Thm1b, ImpliedThresholdInvertsZ) {
    for (double z : {-2.0, 0.0, 1.5}) {
        const auto e = thm1b_joint(gauss5(), 7.0, z);
        EXPECT_NEAR(thm1b_z_for(gauss5(), 7.0, *e.implied_y), z, 1e-12);
    }
}

TEST(Thm1b, RejectsOutsideRegime) {
    EXPECT_THROW(thm1b_joint(gauss5(), 0.5, 0.0), RegimeError);  // h = 0.25
    EXPECT_THROW(thm1b_joint(gauss5(), 6.0, 11.0), RegimeError);
}

TEST(Thm1c, SpecExamples) {
    const auto c = thm1c_joint(gauss5(), 6.0, 1.0);
    EXPECT_DOUBLE_EQ(c.value, marginal_berman(gauss5(), 6.0).value);
    EXPECT_DOUBLE_EQ(c.value, thm1c_joint(gauss5(), 6.0, 0.5).value);
    EXPECT_NEAR(c.value / joint_survival_exact(gauss5(), 6.0, 1.0).value, 1.0, 0.15);
    EXPECT_EQ(c.correction_terms.size(), 3u);
}

TEST(Thm1c, RejectsOutsideRegime) {
    EXPECT_THROW(thm1c_joint(gauss0(), 6.0, 1.0), RegimeError);
    EXPECT_THROW(thm1c_joint(gauss5(), 6.0, 2.9), RegimeError);
}

TEST(Thm2, ExpansionPlugInReproducesThm1a) {
    for (auto [x, y] : {std::pair{4.0, 4.0}, std::pair{6.0, 5.0}, std::pair{9.0, 7.5}}) {
        const double a = thm2_joint(gauss5(), x, y, {}, MarginalPlugIn::expansion).value;
        EXPECT_NEAR(a / thm1a_joint(gauss5(), x, y).value, 1.0, 1e-12);
    }
}

TEST(Thm2, AccurateAndConsistentWithThm1a) {
    EXPECT_NEAR(thm2_joint(gauss0(), 6.0, 6.0).value / joint_survival_exact(gauss0(), 6.0, 6.0).value, 1.0, 0.10);
    double prev = INFINITY;
    for (double x : {4.0, 6.0, 8.0}) {
        const double gap = std::fabs(thm2_joint(gauss0(), x, x).value / thm1a_joint(gauss0(), x, x).value - 1.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
}

TEST(MarginalBerman, GaussianMarginal) {
    const auto b = marginal_berman(gauss0(), 3.0);
    EXPECT_NEAR(b.value, std::exp(-4.5) / (3.0 * std::sqrt(2 * kPi)), 1e-16);
    EXPECT_NEAR(b.value / oracle::normal_sf(3.0), 1.094, 5e-4);
    double prev = INFINITY;
    for (double x : {3.0, 5.0, 8.0}) {
        const double gap = std::fabs(marginal_berman(gauss0(), x).value / marginal_survival_exact(gauss0(), x).value - 1);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
}

TEST(MarginalBerman, KotzTailDisplay) {
    KotzParams p;
    p.C = 2.0;
    p.N = 1.0;
    p.c = 0.7;
    p.delta = 1.5;
    const EllipticalPair pair(0.2, make_kotz(p));
    for (double u : {6.0, 10.0, 20.0}) {
        const double display = p.C / std::sqrt(2 * p.c * p.delta * kPi) * std::pow(u, p.N - p.delta / 2) *
                               std::exp(-p.c * std::pow(u, p.delta));
        EXPECT_NEAR(marginal_berman(pair, u).value / display, 1.0, 1e-12);
    }
}

TEST(Thm3, ConditionalExamples) {
    double prev = INFINITY;
    for (double x : {4.0, 6.0, 8.0}) {
        const double v = thm3_conditional(gauss0(), x, x).value;
        EXPECT_LT(v, prev);
        prev = v;
    }
    const auto e = thm3_conditional(gauss0(), 6.0, 6.0);
    EXPECT_NEAR(e.value / conditional_survival_exact(gauss0(), 6.0, 6.0).value, 1.0, 0.10);

    prev = INFINITY;
    for (double x : {4.0, 6.0, 8.0}) {
        const auto t = thm3_conditional(gauss0(), x, x);
        const double gap = std::fabs(t.value / *t.alternate_value - 1.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
}

TEST(Thm3, ShiftedExamples) {
    for (double a : {0.8, 1.0}) {
        const double base = thm3_conditional(gauss5(), 6.0, a * 6.0).value;
        EXPECT_NEAR(thm3_shifted(gauss5(), a, 6.0, 0.0).value / base, 1.0, 1e-13);
    }
    const double lambda = directional_constants(0.5, 1.0).lambda;
    const double v0 = std::log(thm3_shifted(gauss5(), 1.0, 6.0, 0.0).value);
    for (double z : {0.3, 1.0, 2.5}) {
        EXPECT_NEAR(std::log(thm3_shifted(gauss5(), 1.0, 6.0, z).value) - v0, -lambda * z, 1e-12);
    }

    double lo = INFINITY, hi = 0.0;
    for (double z : {0.0, 0.5, 1.0}) {
        const auto e = thm3_shifted(gauss0(), 1.0, 6.0, z);
        const double r = e.value / conditional_survival_exact(gauss0(), 6.0, *e.implied_y).value;
        EXPECT_NEAR(r, 1.0, 0.15);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    EXPECT_LT(hi - lo, 0.05);
    EXPECT_THROW(thm3_shifted(gauss0(), 1.0, 6.0, -0.1), DomainError);
    EXPECT_THROW(thm3_shifted(gauss5(), 0.5, 6.0, 0.0), DomainError);
}

TEST(ILeadingTerms, ApproachIntegral) {
    const RadialModel& m = gauss0().model();
    double prev = INFINITY;
    for (double x : {4.0, 8.0, 16.0}) {
        const double gap = std::fabs(integral_I_leading(1.5, x, m) / integral_I(1.5, x, m).value - 1.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 0.01);
    prev = INFINITY;
    for (double x : {4.0, 8.0, 16.0}) {
        const double a = 1.0 + 1.0 / h_of(m, x);
        const double gap = std::fabs(integral_I_near_one_leading(1.0, x, m) / integral_I(a, x, m).value - 1.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 0.02);
}

TEST(Regime, NamesRoundTrip) {
    for (Regime r : {Regime::thm1a, Regime::thm1b, Regime::thm1c, Regime::thm2, Regime::thm3, Regime::marginal})
        EXPECT_EQ(parse_regime(to_string(r)), r);
    EXPECT_EQ(parse_regime("1b"), Regime::thm1b);
    EXPECT_THROW(parse_regime("4"), DomainError);
}

// Every point is either accepted by exactly one of the three thm1
// expansions under the default margins or flagged as a boundary point.
TEST(Regime, PartitionProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const RegimeMargins m;
    for (int i = 0; i < 4000; ++i) {
        const double rho = 0.95 * u01(rng);
        const double x = 3.0 + 5.0 * u01(rng);
        const double y = x * u01(rng);
        const EllipticalPair p(rho, make_gaussian_radius());
        const RegimeChoice c = classify_regime(rho, x, y, m);
        const double t = y / x;
        bool a_ok = true, c_ok = true;
        try {
            thm1a_joint(p, x, y, m);
        } catch (const RegimeError&) {
            a_ok = false;
        }
        try {
            thm1c_joint(p, x, y, m);
        } catch (const RegimeError&) {
            c_ok = false;
        }
        const bool b_ok = std::fabs(t - rho) <= m.strip_width * std::sqrt(1 - rho * rho);
        const int accepted = int(a_ok) + int(b_ok) + int(c_ok);
        if (c.boundary) {
            EXPECT_EQ(accepted, 0) << rho << " " << x << " " << y;
        } else {
            EXPECT_EQ(accepted, 1) << rho << " " << x << " " << y;
            EXPECT_TRUE((c.regime == Regime::thm1a && a_ok) || (c.regime == Regime::thm1b && b_ok) ||
                        (c.regime == Regime::thm1c && c_ok));
        }
    }
}

TEST(Regime, AutoEvaluatesBoundaryTwice) {
    // t = 0.6 lies between the 1b strip (|t - 0.5| <= 0.043) and the 1a margin.
    const AutoEstimate a = auto_joint(gauss5(), 8.0, 4.8);
    EXPECT_TRUE(a.boundary);
    ASSERT_TRUE(a.alternate_regime.has_value());
    EXPECT_TRUE(a.estimate.alternate_value.has_value());

    const AutoEstimate d = auto_joint(gauss5(), 6.0, 6.0);
    EXPECT_FALSE(d.boundary);
    EXPECT_EQ(d.estimate.regime, Regime::thm1a);
    const AutoEstimate s = auto_joint(gauss5(), 6.0, 12.0);  // swapped to (12, 6)
    EXPECT_EQ(s.estimate.regime, Regime::thm1b);
    EXPECT_EQ(auto_joint(gauss5(), 6.0, 1.0).estimate.regime, Regime::thm1c);
}

// Convergence of asymptotic / exact to 1 for every built-in model.
struct ConvergenceCase {
    std::string name;
    RadialModel model;
    double rho;
    std::vector<double> grid;
};

class Convergence : public ::testing::TestWithParam<int> {
public:
    static std::vector<ConvergenceCase> cases() {
        KotzParams k3;
        k3.C = 2.0;
        k3.N = 2.0;
        k3.c = 0.7;
        k3.delta = 3.0;
        KotzParams k1;
        k1.c = 1.0;
        k1.delta = 1.0;
        KotzParams kn;
        kn.N = 1.0;
        const RadialModel te =
            make_tail_equivalent({.base = make_gaussian_radius(), .a = 0.1, .gamma = 1.0, .tau = 1.0});
        const RadialModel mix = make_mixture({{{0.5, make_gaussian_radius()}, {0.5, make_kotz(kn)}}, ""});
        return {{"gaussian", make_gaussian_radius(), 0.5, {6, 9, 12, 15}},
                {"kotz_delta3", make_kotz(k3), 0.3, {3, 4, 5, 6}},
                {"kotz_exponential", make_kotz(k1), 0.5, {20, 40, 80, 160}},
                {"tail_equivalent", te, 0.5, {6, 9, 12, 15}},
                {"mixture", mix, 0.5, {6, 9, 12, 15}}};
    }
};

TEST_P(Convergence, Thm1aThm1bThm1cThm3) {
    const auto c = cases()[static_cast<std::size_t>(GetParam())];
    const EllipticalPair p(c.rho, c.model);
    const auto& m = c.model;
    std::vector<double> g1a, g1b, g1c, g3;
    double bound_1a = 0, bound_1b = 0;
    for (double x : c.grid) {
        const double y = 0.9 * x;
        g1a.push_back(std::fabs(ratio_1a(p, x, y) - 1.0));
        const auto b = thm1b_joint(p, x, 0.5);
        g1b.push_back(std::fabs(b.value / joint_survival_exact(p, x, *b.implied_y).value - 1.0));
        g1c.push_back(std::fabs(thm1c_joint(p, x, 0.1 * x).value / joint_survival_exact(p, x, 0.1 * x).value - 1.0));
        g3.push_back(std::fabs(thm3_conditional(p, x, y).value / conditional_survival_exact(p, x, y).value - 1.0));
        const double ax = geometry_at(c.rho, x, y).alpha * x;
        bound_1a = m.second_order_A(ax).value() + 1.0 / (x * m.scaling_w(ax));
        bound_1b = m.second_order_A(x).value() + 1.0 / h_of(m, x);
    }
    for (const auto* g : {&g1a, &g1b, &g1c, &g3}) {
        for (std::size_t i = g->size() - 3; i + 1 < g->size(); ++i)
            EXPECT_LE((*g)[i + 1], (*g)[i] * (1 + 1e-9)) << c.name << " index " << i;
    }
    EXPECT_LE(g1a.back(), 10.0 * bound_1a) << c.name;
    EXPECT_LE(g3.back(), 10.0 * bound_1a) << c.name;
    EXPECT_LE(g1b.back(), 10.0 * bound_1b) << c.name;
}

INSTANTIATE_TEST_SUITE_P(Models, Convergence, ::testing::Range(0, 5),
                         [](const auto& info) { return Convergence::cases()[static_cast<std::size_t>(info.param)].name; });
