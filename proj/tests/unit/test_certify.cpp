#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kvge/certify.hpp"
#include "oracles.hpp"
#include "specs.hpp"

using namespace kvge;
using kvge::testing::example_spec;
using kvge::testing::make_spec;
using kvge::testing::SpecText;

namespace {

const double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

SpecText concave_text(double lambda) {
    SpecText s;
    s.p = "1";
    s.lambda = lambda;
    s.rho1 = 0.01;
    s.rho2 = 10.0;
    return s;
}

SpecText mixed_text(double lambda) {
    SpecText s;
    s.p = "1/2 + t";
    s.lambda = lambda;
    s.rho1 = 0.01;
    s.rho2 = 10.0;
    return s;
}

}  // namespace

TEST(CertifyTheorem, Names) {
    for (Theorem t : {Theorem::Auto, Theorem::T2_8, Theorem::T3_6, Theorem::T4_4, Theorem::C2_10, Theorem::C2_11})
        EXPECT_EQ(parse_theorem(to_string(t)), t);
    EXPECT_EQ(to_string(Theorem::C2_10), "c2.10");
    EXPECT_THROW(parse_theorem("t2.9"), CertifyError);
}

TEST(CertifyExtremal, Examples) {
    const auto one = Expression::parse("1", {"t", "u"});
    EXPECT_EQ(extremal_f(one, 0, 1, 0, 5, Extremum::Min).value, 1.0);
    EXPECT_EQ(extremal_f(one, 0, 1, 0, 5, Extremum::Max).value, 1.0);
    const auto u = Expression::parse("u", {"t", "u"});
    EXPECT_DOUBLE_EQ(extremal_f(u, 0, 1, 1.0 / 200.0, 102.0 / 25.0 * std::sqrt(2.0), Extremum::Min).value,
                     1.0 / 200.0);
    const auto sep = Expression::parse("sin(pi*t)*u", {"t", "u"});
    EXPECT_NEAR(extremal_f(sep, 0.25, 0.75, 2, 3, Extremum::Min).value, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(extremal_f(sep, 0.25, 0.75, 2, 3, Extremum::Max).value, 3.0, 1e-12);
}

TEST(CertifyExtremal, InteriorExtremumIsRefined) {
    // Three 5x refinements leave spacings h_t = 1/(n-1)/125 and h_u = 2/(n-1)/125;
    // the incumbent is within half a spacing of the minimizer in each variable.
    const auto f = Expression::parse("1 + (t - 0.3217)^2 + (u - 1.2345)^2", {"t", "u"});
    for (int n : {41, 201}) {
        const double ht = 1.0 / (n - 1) / 125.0;
        const double hu = 2.0 / (n - 1) / 125.0;
        const double bound = (ht * ht + hu * hu) / 4.0;
        EXPECT_NEAR(extremal_f(f, 0, 1, 0, 2, Extremum::Min, n).value, 1.0, bound) << n;
    }
}

TEST(CertifyExtremal, Errors) {
    const auto u = Expression::parse("u - 1", {"t", "u"});
    EXPECT_THROW(extremal_f(u, 0, 1, 2, 1, Extremum::Min), CertifyError);
    EXPECT_THROW(extremal_f(u, 0, 1, 0, 2, Extremum::Min), CertifyError);
    const auto bad = Expression::parse("ln(u)", {"t", "u"});
    EXPECT_THROW(extremal_f(bad, 0, 1, 0, 2, Extremum::Max), CertifyError);
}

TEST(CertifyExample, PassesWithExactThresholds) {
    const auto spec = example_spec();
    EXPECT_EQ(select_theorem(spec), Theorem::C2_10);
    const auto c = certify(spec);
    EXPECT_EQ(c.theorem, Theorem::C2_10);
    EXPECT_TRUE(c.pass);
    EXPECT_TRUE(c.positivity_ok);
    ASSERT_TRUE(c.lambda_window.has_value());
    const double lower = 256.0 / 375.0 * std::sqrt(379.0 / 3.0) * std::sin(kPi / 15000.0);
    const double upper = 8000.0 * std::pow(3.0, 0.2);
    EXPECT_LT(rel(c.lambda_window->lambda_min, lower), 1e-9);
    EXPECT_LT(rel(c.lambda_window->lambda_max, upper), 1e-9);
    EXPECT_NEAR(c.localization_lower, 0.02, 1e-12);
    EXPECT_NEAR(c.localization_upper, 4.0 * std::sqrt(2.0) * (std::sqrt(3.0) + 1.0), 1e-12);
    EXPECT_NEAR(c.f_min_box.u_lo, 1.0 / 200.0, 1e-15);
    EXPECT_NEAR(c.f_min_box.u_hi, 102.0 / 25.0 * std::sqrt(2.0), 1e-12);
    EXPECT_EQ(c.f_min_box.t_lo, 0.25);
    EXPECT_EQ(c.f_min_box.t_hi, 0.75);
    EXPECT_EQ(c.f_max_box.u_lo, 0.0);
    EXPECT_NEAR(c.condition1_rhs, (1.0 / 2500.0) * 1024.0, 1e-15);
    EXPECT_EQ(c.condition2_rhs, 3.0);
    EXPECT_NEAR(c.A_rho2, 1000.0, 1e-9);
    EXPECT_NEAR(c.A_rho1, 1000.0 / 3.0 / 2500.0 * std::sin(kPi / 15000.0), 1e-15);
    EXPECT_EQ(c.inner_mass, 0.5);
    // Both branches are reported.
    EXPECT_NEAR(c.condition2_branch_minus, std::pow(c.condition2_x, 2.0), 1e-20);
    EXPECT_NEAR(c.condition2_branch_plus, std::pow(c.condition2_x, 5.0), 1e-30);
}

TEST(CertifyExample, ZeroLambdaFailsConditionOne) {
    const auto c = certify(example_spec(0.0));
    EXPECT_FALSE(c.condition1_ok);
    EXPECT_LT(c.condition1_lhs, 0.0);
    EXPECT_FALSE(c.pass);
}

TEST(CertifyExample, HugeLambdaFailsConditionTwo) {
    const auto c = certify(example_spec(1e7));
    EXPECT_TRUE(c.condition1_ok);
    EXPECT_FALSE(c.condition2_ok);
    EXPECT_FALSE(c.pass);
}

TEST(CertifyExample, MarginTightensBothConditions) {
    CertifyOptions opts;
    const double upper = 8000.0 * std::pow(3.0, 0.2);
    EXPECT_TRUE(certify(example_spec(upper * 0.99), opts).pass);
    opts.margin = 0.1;
    const auto c = certify(example_spec(upper * 0.99), opts);
    EXPECT_FALSE(c.condition2_ok);
    ASSERT_TRUE(c.lambda_window.has_value());
    EXPECT_LT(c.lambda_window->lambda_max, upper * 0.99);
    opts.margin = -1.0;
    EXPECT_THROW(certify(example_spec(), opts), CertifyError);
}

TEST(CertifyExample, C210MatchesT28WithSpecialBound) {
    const auto spec = example_spec();
    const auto a = check_corollary_2_10(spec);
    const auto b = check_theorem_2_8(spec, {}, BoundKind::SpecialMstar);
    EXPECT_EQ(b.theorem, Theorem::T2_8);
    for (auto [x, y] : {std::pair{a.condition1_lhs, b.condition1_lhs}, std::pair{a.condition1_rhs, b.condition1_rhs},
                        std::pair{a.condition2_lhs, b.condition2_lhs}, std::pair{a.condition2_rhs, b.condition2_rhs},
                        std::pair{a.localization_lower, b.localization_lower},
                        std::pair{a.localization_upper, b.localization_upper},
                        std::pair{a.f_min_box.value, b.f_min_box.value},
                        std::pair{a.lambda_window->lambda_min, b.lambda_window->lambda_min},
                        std::pair{a.lambda_window->lambda_max, b.lambda_window->lambda_max}})
        EXPECT_LE(std::abs(x - y), 1e-9 * std::max(1.0, std::abs(x)));
    EXPECT_THROW(check_theorem_2_8(spec, {}, BoundKind::ConcaveMixedMbar), CertifyError);
}

TEST(CertifyExample, GeneralConvexBoundIsWeakerThanSpecial) {
    const auto spec = example_spec();
    const auto general = check_theorem_2_8(spec);
    const auto special = check_corollary_2_10(spec);
    EXPECT_NEAR(general.q, 1.999, 1e-12);
    EXPECT_GT(general.localization_upper, special.localization_upper);
    EXPECT_TRUE(general.pass);
}

TEST(CertifyConstantExponent, C211CollapsesTheCorrectionTerm) {
    SpecText s;
    s.p = "2";
    s.lambda = 100.0;
    s.rho1 = 0.01;
    s.rho2 = 10.0;
    const auto spec = make_spec(s);
    EXPECT_EQ(select_theorem(spec), Theorem::C2_11);
    const auto c = certify(spec);
    EXPECT_EQ(c.bounds_rho1.eps, 0.0);
    EXPECT_NEAR(c.localization_upper, 2.0 * (std::sqrt(10.0) + 1.0), 1e-12);
}

TEST(CertifyRegime, MismatchesAreRejected) {
    EXPECT_THROW(check_theorem_3_6(example_spec()), RegimeMismatchError);
    EXPECT_THROW(check_theorem_4_4(example_spec()), RegimeMismatchError);
    EXPECT_THROW(check_theorem_2_8(make_spec(concave_text(1.0))), RegimeMismatchError);
    EXPECT_THROW(check_corollary_2_11(example_spec()), RegimeMismatchError);
    SpecText s = kvge::testing::example_text();
    const auto rl = make_spec(s, Kernel::riemann_liouville(0.5));
    EXPECT_EQ(select_theorem(rl), Theorem::T2_8);
    EXPECT_THROW(check_corollary_2_10(rl), RegimeMismatchError);
    EXPECT_NO_THROW(require_theorem_applies(rl, Theorem::Auto));
}

TEST(CertifyConcave, WindowIsTheExactFlipPoint) {
    // p = 1, b = 1, A = 1, f = 1, eta0 = 1/4: condition (1) is
    // (lambda 3/32 - 1) / 2 > rho1 / eta0 = 4 rho1, so lambda_min = (32/3) (1 + 8 rho1).
    const double lambda_min = 32.0 / 3.0 * (1.0 + 8.0 * 0.01);
    const auto c = check_theorem_3_6(make_spec(concave_text(1.0)));
    ASSERT_TRUE(c.lambda_window.has_value());
    EXPECT_LT(rel(c.lambda_window->lambda_min, lambda_min), 1e-12);
    // Condition (2): lambda / 8 < rho2 = 10.
    EXPECT_LT(rel(c.lambda_window->lambda_max, 80.0), 1e-12);
    EXPECT_FALSE(check_theorem_3_6(make_spec(concave_text(lambda_min * (1 - 1e-9)))).condition1_ok);
    EXPECT_TRUE(check_theorem_3_6(make_spec(concave_text(lambda_min * (1 + 1e-9)))).condition1_ok);
    EXPECT_TRUE(check_theorem_3_6(make_spec(concave_text(80.0 * (1 - 1e-9)))).condition2_ok);
    EXPECT_FALSE(check_theorem_3_6(make_spec(concave_text(80.0 * (1 + 1e-9)))).condition2_ok);
}

TEST(CertifyConcave, ZeroForcingFails) {
    SpecText s = concave_text(20.0);
    s.f = "0";
    const auto c = check_theorem_3_6(make_spec(s));
    EXPECT_FALSE(c.condition1_ok);
    EXPECT_FALSE(c.pass);
    EXPECT_FALSE(c.lambda_window.has_value());
}

TEST(CertifyConcave, LargeRho2PassesConditionTwo) {
    SpecText s = concave_text(20.0);
    s.rho2 = 1e6;
    EXPECT_TRUE(check_theorem_3_6(make_spec(s)).condition2_ok);
}

TEST(CertifyMixed, HandComputedClosedForms) {
    const double lambda = 5.0;
    const auto c = check_theorem_4_4(make_spec(mixed_text(lambda)));
    const double y = lambda * 3.0 / 32.0;
    const double lhs1 = std::pow(0.25, 1.5) * std::sqrt(y) * 0.5;
    EXPECT_NEAR(c.condition1_lhs, lhs1, 1e-14);
    EXPECT_NEAR(*c.condition1_variant_lhs, std::pow(0.25, 1.5) * (std::sqrt(y) - 1.0) * 0.5, 1e-14);
    EXPECT_EQ(c.condition1_rhs, 0.01);
    const double x = lambda / 8.0;
    EXPECT_NEAR(c.condition2_x, x, 1e-15);
    EXPECT_NEAR(c.condition2_lhs, std::max(std::sqrt(x), std::pow(x, 1.5)), 1e-14);
    EXPECT_EQ(c.condition2_rhs, 10.0);
    EXPECT_TRUE(c.pass);
    EXPECT_FALSE(*c.condition1_variant_ok);
    // lambda_min solves (1/8) sqrt(lambda 3/32) / 2 = rho1.
    EXPECT_LT(rel(c.lambda_window->lambda_min, std::pow(16.0 * 0.01, 2.0) * 32.0 / 3.0), 1e-12);
}

TEST(CertifyMixed, VariantPassImpliesPrintedPass) {
    for (double lambda : {1.0, 10.0, 50.0, 200.0}) {
        const auto c = check_theorem_4_4(make_spec(mixed_text(lambda)));
        if (*c.condition1_variant_ok) EXPECT_TRUE(c.condition1_ok);
        EXPECT_GE(c.condition1_lhs, *c.condition1_variant_lhs);
    }
    SpecText s = mixed_text(10.0);
    s.f = "0";
    EXPECT_FALSE(check_theorem_4_4(make_spec(s)).pass);
}

TEST(CertifyPositivity, NonPositiveCoefficientFails) {
    SpecText s = kvge::testing::quadratic_text();
    s.A = "t - 1/2";
    s.p = "2";
    const auto c = certify(make_spec(s));
    EXPECT_FALSE(c.positivity_ok);
    EXPECT_FALSE(c.pass);
    EXPECT_LT(c.A_min_sampled, 0.0);
    EXPECT_FALSE(c.lambda_window.has_value());
}

TEST(CertifyWindow, InconsistentBoxesAreRejected) {
    Certificate c = certify(example_spec());
    c.f_max_box.value = 0.5 * c.f_min_box.value;
    EXPECT_THROW(lambda_window(c), CertifyError);
    c.f_max_box.value = 0.0;
    c.f_min_box.value = 0.0;
    EXPECT_FALSE(lambda_window(c).has_value());
}

TEST(CertifyValidation, BadSpecs) {
    SpecText s = kvge::testing::example_text();
    s.rho1 = 3.0;
    EXPECT_THROW(certify(make_spec(s)), CertifyError);
    s = kvge::testing::example_text();
    s.rho1 = 0.0;
    EXPECT_THROW(certify(make_spec(s)), CertifyError);
    s = kvge::testing::example_text(-1.0);
    EXPECT_THROW(certify(make_spec(s)), CertifyError);
    s = kvge::testing::example_text(1.0, "u - 1");
    EXPECT_THROW(certify(make_spec(s)), CertifyError);
}

TEST(CertifyProperty, ConditionsAreMonotoneInLambda) {
    kvge::testing::Rng rng(5);
    const auto base = certify(example_spec());
    const auto w = *base.lambda_window;
    bool prev1 = false;
    bool prev2 = true;
    for (int k = 0; k <= 60; ++k) {
        const double lambda = std::pow(10.0, -4.0 + 9.0 * k / 60.0);
        const auto c = certify(example_spec(lambda));
        EXPECT_TRUE(!prev1 || c.condition1_ok) << "lambda=" << lambda;
        EXPECT_TRUE(prev2 || !c.condition2_ok) << "lambda=" << lambda;
        EXPECT_EQ(c.condition1_ok, lambda > w.lambda_min);
        EXPECT_EQ(c.condition2_ok, lambda < w.lambda_max);
        prev1 = c.condition1_ok;
        prev2 = c.condition2_ok;
    }
    EXPECT_FALSE(certify(example_spec(w.lambda_min * (1 - 1e-9))).condition1_ok);
    EXPECT_TRUE(certify(example_spec(w.lambda_min * (1 + 1e-9))).condition1_ok);
    EXPECT_TRUE(certify(example_spec(w.lambda_max * (1 - 1e-9))).condition2_ok);
    EXPECT_FALSE(certify(example_spec(w.lambda_max * (1 + 1e-9))).condition2_ok);
}
