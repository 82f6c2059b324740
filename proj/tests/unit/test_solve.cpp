#include <gtest/gtest.h>

#include <cmath>

#include "kvge/solve.hpp"
#include "oracles.hpp"
#include "specs.hpp"

using namespace kvge;
using kvge::testing::make_spec;
using kvge::testing::SpecText;
namespace oracle = kvge::testing;

namespace {

std::vector<double> to_vector(const GridFunction& u) { return {u.values().begin(), u.values().end()}; }

SpecText local_text(const std::string& f, double lambda = 1.0) {
    SpecText s;
    s.A = "1";
    s.f = f;
    s.lambda = lambda;
    s.rho1 = 0.001;
    s.rho2 = 1.0;
    return s;
}

const double kQuadraticC = (-12.0 + std::sqrt(192.0)) / 2.0;

}  // namespace

TEST(SolveApply, LocalLinearProblemIsExactOnNodes) {
    const auto spec = make_spec(local_text("1"));
    const auto v = apply_T(spec, GridFunction::constant(257, 0.0), 0.5);
    const auto exact = GridFunction::sample(257, [](double t) { return t * (1.0 - t) / 2.0; });
    EXPECT_LE(oracle::sup_distance(to_vector(v), to_vector(exact)), 1e-8);
}

TEST(SolveApply, ZeroIsFixedUnderZeroForcing) {
    const auto spec = make_spec(local_text("u"));
    const auto v = apply_T(spec, GridFunction::constant(65, 0.0), 0.5);
    EXPECT_EQ(v.sup_norm(), 0.0);
}

TEST(SolveApply, LinearInLambdaAndForcing) {
    const auto u = GridFunction::sample(129, [](double t) { return std::sin(3.0 * t) + 1.0; });
    const auto v1 = apply_T(make_spec(local_text("t^2")), u, 0.3);
    const auto v2 = apply_T(make_spec(local_text("t^2", 2.0)), u, 0.3);
    for (std::size_t i = 0; i < v1.size(); ++i) EXPECT_EQ(v2[i], 2.0 * v1[i]);
    const auto a = apply_T(make_spec(local_text("exp(t)")), u, 0.3);
    const auto b = apply_T(make_spec(local_text("cos(t)")), u, 0.3);
    const auto sum = apply_T(make_spec(local_text("exp(t) + cos(t)")), u, 0.3);
    for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(sum[i], a[i] + b[i], 1e-12);
}

TEST(SolveApply, DegenerateCoefficientIsReported) {
    auto s = local_text("1");
    s.A = "t - 1/2";
    const HammersteinOperator op(make_spec(s), 33);
    try {
        op.apply(GridFunction::constant(33, 1.0), 0.25);
        FAIL() << "expected DegenerateCoefficientError";
    } catch (const DegenerateCoefficientError& e) {
        EXPECT_EQ(e.z(), 0.25);
    }
    EXPECT_THROW(op.apply(GridFunction::constant(33, 1.0), 0.5), DegenerateCoefficientError);
    EXPECT_NO_THROW(op.apply(GridFunction::constant(33, 1.0), 0.75));
}

TEST(SolveApply, NegativeForcingIsRejected) {
    const HammersteinOperator op(make_spec(local_text("u - 1")), 33);
    EXPECT_THROW(op.apply(GridFunction::constant(33, 0.0), 0.5), SolveError);
}

TEST(SolveInner, IndependentForcingConvergesImmediately) {
    const auto r = inner_solve(make_spec(local_text("1 + t")), 0.5, GridFunction::constant(129, 0.3));
    EXPECT_LE(r.iterations, 1);
    EXPECT_LE(r.residual, 1e-10);
}

TEST(SolveInner, ContractionToZero) {
    const auto r = inner_solve(make_spec(local_text("u/2")), 0.5, GridFunction::constant(129, 1.0));
    EXPECT_LE(r.u.sup_norm(), 1e-9);
    EXPECT_LE(r.residual, 1e-10);
}

TEST(SolveInner, MatchesShootingOracle) {
    const auto r = inner_solve(make_spec(local_text("1 + u/4")), 0.5, GridFunction::constant(257, 0.0));
    const auto exact = oracle::shoot_dirichlet([](double, double u) { return 1.0 + u / 4.0; }, 257);
    EXPECT_LE(oracle::sup_distance(to_vector(r.u), exact), 1e-6);
}

TEST(SolveInner, NonlinearForcingMatchesShootingOracle) {
    // Lower branch of the Bratu problem -u'' = exp(u) scaled by 1/2.
    const auto r = inner_solve(make_spec(local_text("exp(u)", 0.5)), 0.5, GridFunction::constant(257, 0.0));
    const auto exact = oracle::shoot_dirichlet([](double, double u) { return 0.5 * std::exp(u); }, 257);
    EXPECT_LE(oracle::sup_distance(to_vector(r.u), exact), 1e-5);
}

TEST(SolveInner, DivergenceIsReported) {
    // Beyond the Bratu fold (lambda ~ 3.51) there is no solution.
    SolveOptions opts;
    opts.max_iters = 300;
    try {
        inner_solve(make_spec(local_text("exp(u)", 10.0)), 0.5, GridFunction::constant(33, 0.0), opts);
        FAIL() << "expected a SolveError";
    } catch (const DivergenceError& e) {
        EXPECT_GT(e.last_residual(), 0.0);
    } catch (const SolveError&) {
    }
}

TEST(SolveOuter, QuadraticOracle) {
    const auto r = outer_solve(make_spec(kvge::testing::quadratic_text()));
    ASSERT_EQ(r.profiles.size(), 1u);
    const auto& p = r.profiles.front();
    EXPECT_NEAR(p.z_star, kQuadraticC / 12.0, 1e-8);
    EXPECT_TRUE(p.all_ok());
    EXPECT_LE(p.outer_residual, 10 * SolveOptions{}.tol_outer);
    EXPECT_LE(p.residual_sup, 1e-8);
}

TEST(SolveOuter, LocalProblemHasConstantPhi) {
    auto s = local_text("1");
    s.rho1 = 0.01;
    const auto r = outer_solve(make_spec(s));
    ASSERT_EQ(r.profiles.size(), 1u);
    EXPECT_NEAR(r.profiles.front().z_star, 1.0 / 12.0, 1e-9);
}

TEST(SolveOuter, NoRootOutsideTheBracket) {
    auto s = kvge::testing::quadratic_text();
    s.rho1 = 0.5;
    s.rho2 = 1.0;
    const auto r = outer_solve(make_spec(s));
    EXPECT_FALSE(r.found());
    EXPECT_EQ(r.scan.size(), 64u);
}

TEST(SolveOuter, SkipsNonPositiveCoefficient) {
    auto s = kvge::testing::quadratic_text();
    s.A = "(t - 0.5)*(1 + t)";
    s.rho1 = 0.01;
    s.rho2 = 1.0;
    const auto r = outer_solve(make_spec(s));
    bool skipped = false;
    for (const auto& p : r.scan)
        if (!p.g) skipped = true;
    EXPECT_TRUE(skipped);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(SolveOuter, ExampleHasACertifiedRoot) {
    const auto r = outer_solve(kvge::testing::example_spec());
    ASSERT_GE(r.profiles.size(), 1u);
    for (const auto& p : r.profiles) {
        EXPECT_GT(p.z_star, 1.0 / 2500.0);
        EXPECT_LT(p.z_star, 3.0);
        EXPECT_LE(p.residual_sup, 1e-8);
        EXPECT_TRUE(p.all_ok());
        EXPECT_GE(p.sup_norm, 0.02 - 1e-6);
        EXPECT_LE(p.sup_norm, 4.0 * std::sqrt(2.0) * (std::sqrt(3.0) + 1.0) + 1e-6);
        EXPECT_NEAR(Kernel::constant_one().nonlocal_value(p.u, Expression::parse("7/2 + 3/2*cos(t)", {"t"}),
                                                          Interpolation::Cubic),
                    p.z_star, 1e-9);
    }
}

TEST(SolveOuter, ResultIndependentOfThreadCount) {
    SolveOptions one;
    one.threads = 1;
    SolveOptions many;
    many.threads = 4;
    const auto spec = kvge::testing::example_spec();
    const auto a = outer_solve(spec, one);
    const auto b = outer_solve(spec, many);
    ASSERT_EQ(a.scan.size(), b.scan.size());
    for (std::size_t k = 0; k < a.scan.size(); ++k) EXPECT_EQ(a.scan[k].g, b.scan[k].g);
    ASSERT_EQ(a.profiles.size(), b.profiles.size());
    for (std::size_t k = 0; k < a.profiles.size(); ++k) {
        EXPECT_EQ(a.profiles[k].z_star, b.profiles[k].z_star);
        EXPECT_EQ(to_vector(a.profiles[k].u), to_vector(b.profiles[k].u));
    }
}

TEST(SolveVerify, ZeroAndScaledProfiles) {
    const auto spec = make_spec(kvge::testing::quadratic_text());
    const auto zero = verify_profile(spec, GridFunction::constant(129, 0.0), 0.0, 0.01, 10.0);
    EXPECT_TRUE(zero.cone_ok);
    EXPECT_FALSE(zero.localization_ok);
    const auto r = outer_solve(spec);
    ASSERT_TRUE(r.found());
    const auto& p = r.profiles.front();
    std::vector<double> doubled = to_vector(p.u);
    for (auto& v : doubled) v *= 2.0;
    const auto checks = verify_profile(spec, GridFunction(doubled), p.z_star, 0.01, 10.0);
    EXPECT_GT(checks.residual_sup, 1e-3);
}

TEST(SolveVerify, AnnulusRequiresStrictInclusion) {
    const auto spec = make_spec(kvge::testing::quadratic_text());
    const auto u = GridFunction::constant(33, 0.0);
    EXPECT_FALSE(verify_profile(spec, u, 0.01, 0.0, 10.0).annulus_ok);
    EXPECT_FALSE(verify_profile(spec, u, 1.0, 0.0, 10.0).annulus_ok);
}

TEST(SolveProperty, OperatorMapsIntoTheCone) {
    oracle::Rng rng(123);
    for (const auto& spec : {kvge::testing::example_spec(1.0, "1 + u^2*sin(7*t)^2"),
                             make_spec(local_text("exp(-u) + t"))}) {
        const HammersteinOperator op(spec, 129);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> values(129);
            for (auto& v : values) v = rng.uniform(0.0, 3.0);
            const double z = rng.uniform(spec.rho1, spec.rho2);
            const auto out = op.apply(GridFunction(values), z);
            SolveOptions opts;
            const auto checks = verify_profile(spec, out, z, 0.0, INFINITY, opts);
            EXPECT_TRUE(checks.cone_ok) << "trial " << trial;
        }
    }
}

TEST(SolveProperty, SecondOrderGridConvergence) {
    auto g = [](double, double u) { return 1.0 + u / 4.0; };
    std::vector<double> errors;
    for (std::size_t n : {129u, 257u, 513u}) {
        const auto r = inner_solve(make_spec(local_text("1 + u/4")), 0.5, GridFunction::constant(n, 0.0));
        errors.push_back(oracle::sup_distance(to_vector(r.u), oracle::shoot_dirichlet(g, n, 16)));
    }
    EXPECT_GE(std::log2(errors[0] / errors[1]), 1.8);
    EXPECT_GE(std::log2(errors[1] / errors[2]), 1.8);
}

TEST(SolveThreads, EnvironmentCap) {
    EXPECT_GE(resolve_threads(0), 1u);
    EXPECT_EQ(resolve_threads(1), 1u);
}
