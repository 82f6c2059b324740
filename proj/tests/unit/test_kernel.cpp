#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kvge/kernel.hpp"
#include "oracles.hpp"

using kvge::Expression;
using kvge::GridFunction;
using kvge::Kernel;
using kvge::KernelError;
namespace oracle = kvge::testing;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

Expression p_of(const char* source) { return Expression::parse(source, {"t"}); }

}  // namespace

TEST(KernelMass, ConstantOne) { EXPECT_EQ(Kernel::constant_one().mass(), 1.0); }

TEST(KernelMass, RiemannLiouvilleHalf) {
    const auto k = Kernel::riemann_liouville(0.5);
    EXPECT_NEAR(k.mass(), 2.0 / kSqrtPi, 1e-12);
    // Independent graded Simpson after the substitution t = y^2; the node at
    // y = 0 is nudged off the kernel singularity.
    const double graded = oracle::graded_simpson(
        [&](double y) {
            y = std::max(y, 1e-12);
            return 2.0 * y * k(y * y);
        },
        0.0, 1.0, 1.0, 2000);
    EXPECT_NEAR(k.mass(), graded, 1e-10);
}

TEST(KernelMass, ExpressionKernelAgreesWithConstantOne) {
    const auto k = Kernel::from_expression(p_of("1"));
    EXPECT_NEAR(k.mass(), 1.0, 1e-12);
}

TEST(KernelMass, ExpressionKernelQuadrature) {
    const auto k = Kernel::from_expression(p_of("1 + t^2"));
    EXPECT_NEAR(k.mass(), 4.0 / 3.0, 1e-12);
}

TEST(KernelValidation, RejectsBadKernels) {
    EXPECT_THROW(Kernel::riemann_liouville(0.0), KernelError);
    EXPECT_THROW(Kernel::riemann_liouville(1.0), KernelError);
    EXPECT_THROW(Kernel::from_expression(p_of("t - 1/2")), KernelError);
    EXPECT_THROW(Kernel::from_expression(p_of("0")), KernelError);
    EXPECT_THROW(Kernel::from_expression(Expression::parse("u", {"u"})), KernelError);
}

TEST(KernelHolder, ConstantOneIsOne) {
    const auto k = Kernel::constant_one();
    for (double q : {1.1, 2.0, 7.5}) EXPECT_EQ(k.reverse_holder_norm(q), 1.0);
    EXPECT_THROW(k.reverse_holder_norm(1.0), KernelError);
}

TEST(KernelHolder, RiemannLiouvilleClosedForms) {
    const auto k = Kernel::riemann_liouville(0.5);
    EXPECT_NEAR(k.reverse_holder_norm(2.0), 2.0 / 3.0 * kSqrtPi, 1e-10);
    EXPECT_NEAR(k.reverse_holder_norm(4.0), 6.0 / 7.0 * std::cbrt(kSqrtPi), 1e-10);
    // Oracle: integral of (t^(-1/2)/Gamma(1/2))^(-1) = sqrt(pi) t^(1/2).
    const double simpson =
        oracle::graded_simpson([](double t) { return std::sqrt(std::numbers::pi * t); }, 0.0, 1.0, 2.0, 4000);
    EXPECT_NEAR(k.reverse_holder_norm(2.0), simpson, 1e-9);
}

TEST(KernelHolder, DetectsNonIntegrablePower) {
    // b(t) = t: b^(1/(1-q)) = t^(-1/(q-1)) is not integrable for q <= 2.
    const auto k = Kernel::from_expression(p_of("t"));
    EXPECT_TRUE(std::isinf(k.reverse_holder_norm(1.5)));
    EXPECT_NEAR(k.reverse_holder_norm(3.0), 2.0, 1e-6);
}

TEST(KernelNonlocal, ZeroFunctionGivesZero) {
    const auto k = Kernel::constant_one();
    EXPECT_EQ(k.nonlocal_value(GridFunction::constant(65, 0.0), p_of("2 + t")), 0.0);
}

TEST(KernelNonlocal, UnitFunctionGivesMass) {
    for (const auto& k : {Kernel::constant_one(), Kernel::riemann_liouville(0.5)}) {
        EXPECT_NEAR(k.nonlocal_value(GridFunction::constant(65, 1.0), p_of("1/2 + t")), k.mass(), 1e-10);
    }
}

TEST(KernelNonlocal, SquareOfIdentity) {
    const auto k = Kernel::constant_one();
    const auto u = GridFunction::sample(257, [](double s) { return s; });
    EXPECT_NEAR(k.nonlocal_value(u, p_of("2")), 1.0 / 3.0, 1e-10);
}

TEST(KernelNonlocal, RiemannLiouvilleAgainstGradedOracle) {
    const auto k = Kernel::riemann_liouville(0.5);
    const auto u = GridFunction::sample(129, [](double s) { return s; });
    // integral of (1-s)^(-1/2)/sqrt(pi) s^2 ds = B(3, 1/2)/sqrt(pi) = 16/(15 sqrt(pi)).
    EXPECT_NEAR(k.nonlocal_value(u, p_of("2")), 16.0 / (15.0 * kSqrtPi), 1e-9);
}

TEST(KernelNonlocal, RejectsNegativeSamplesAndBadExponents) {
    const auto k = Kernel::constant_one();
    EXPECT_THROW(k.nonlocal_value(GridFunction::sample(9, [](double s) { return s - 0.5; }), p_of("2")), KernelError);
    EXPECT_THROW(k.nonlocal_value(GridFunction::constant(9, 1.0), p_of("t - 1/2")), KernelError);
}

TEST(KernelNonlocal, CubicReadMatchesLinearOnLinearData) {
    const auto k = Kernel::constant_one();
    const auto u = GridFunction::sample(33, [](double s) { return 1.0 + s; });
    EXPECT_NEAR(k.nonlocal_value(u, p_of("1"), kvge::Interpolation::Cubic), 1.5, 1e-12);
    EXPECT_NEAR(k.nonlocal_value(u, p_of("1"), kvge::Interpolation::Linear), 1.5, 1e-12);
}

TEST(KernelProperty, MonotoneInU) {
    oracle::Rng rng(7);
    const auto k = Kernel::riemann_liouville(0.5);
    const auto p = p_of("3/2 + sin(3*t)");
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(65), b(65);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = rng.uniform(0.0, 2.0);
            b[i] = a[i] + rng.uniform(0.0, 0.5);
        }
        EXPECT_LE(k.nonlocal_value(GridFunction(a), p), k.nonlocal_value(GridFunction(b), p) + 1e-12);
    }
}

TEST(KernelProperty, ConstantFunctionScalingSandwich) {
    oracle::Rng rng(11);
    const auto k = Kernel::constant_one();
    const auto p = p_of("1/2 + 2*t");  // p- = 1/2, p+ = 5/2
    for (int trial = 0; trial < 50; ++trial) {
        const double c = rng.uniform(0.0, 4.0);
        const double v = k.nonlocal_value(GridFunction::constant(33, c), p);
        EXPECT_GE(v, k.mass() * std::min(std::pow(c, 0.5), std::pow(c, 2.5)) - 1e-12);
        EXPECT_LE(v, k.mass() * std::max(std::pow(c, 0.5), std::pow(c, 2.5)) + 1e-12);
    }
}

TEST(KernelProperty, RefinementChangesLittle) {
    kvge::quad::Settings loose;
    loose.abs_tol = 1e-8;
    loose.rel_tol = 1e-8;
    kvge::quad::Settings tight;
    tight.abs_tol = 1e-12;
    tight.rel_tol = 1e-12;
    for (const char* b : {"exp(t)", "1 + cos(5*t)^2", "sqrt(t)"}) {
        const auto coarse = Kernel::from_expression(p_of(b), loose);
        const auto fine = Kernel::from_expression(p_of(b), tight);
        EXPECT_NEAR(coarse.mass(), fine.mass(), 1e-7) << b;
    }
}
