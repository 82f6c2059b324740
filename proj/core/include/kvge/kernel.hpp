#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "kvge/expr.hpp"
#include "kvge/grid_function.hpp"
#include "kvge/quadrature.hpp"

namespace kvge {

class KernelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class KernelKind { ConstantOne, RiemannLiouville, Expression };

/// How a grid function is read between its nodes.
enum class Interpolation { Linear, Cubic };

/// The convolution weight b on (0, 1]: nonnegative, integrable, nonzero mass.
///
/// Riemann-Liouville kernels b(t) = t^(order-1) / Gamma(order) are singular
/// at t = 0; every integral against b(1 - s) therefore runs on a mesh graded
/// toward s = 1 with exponent 2/order, and the panel touching the singular
/// end is mapped by x = y^(1/order) so the integrand is bounded there.
class Kernel {
public:
    static Kernel constant_one(quad::Settings settings = {});
    /// Throws KernelError unless 0 < order < 1.
    static Kernel riemann_liouville(double order, quad::Settings settings = {});
    /// `b` must be an expression in the single variable `t`. Validation
    /// samples t = k/1000, k = 1..1000, and rejects negative or non-finite
    /// values, then rejects kernels whose mass is not positive.
    static Kernel from_expression(const Expression& b, quad::Settings settings = {});

    KernelKind kind() const noexcept { return kind_; }
    bool is_constant_one() const noexcept { return kind_ == KernelKind::ConstantOne; }
    double order() const noexcept { return order_; }
    const std::optional<Expression>& expression() const noexcept { return expr_; }
    const quad::Settings& settings() const noexcept { return settings_; }
    std::string describe() const;

    /// b(t) for t in (0, 1].
    double operator()(double t) const;

    /// (b * 1)(1) = integral of b over [0, 1]. Cached at construction.
    double mass() const noexcept { return mass_; }

    /// integral of b(s)^(1/(1-q)) over [0, 1]; +infinity when the estimate
    /// keeps growing under refinement (four successive refinements each
    /// larger by a factor over 1.5). Throws KernelError for q <= 1.
    double reverse_holder_norm(double q) const;

    /// integral of b(1 - s) g(s) over [lo, hi] subset of [0, 1], where g is
    /// smooth between consecutive `breakpoints`.
    double weighted_integral(const std::function<double(double)>& g, double lo, double hi,
                             std::span<const double> breakpoints = {}) const;

    /// integral of b(1 - s) over [lo, hi].
    double tail_mass(double lo, double hi) const;

    /// (b * u^p)(1) = integral of b(1 - s) u(s)^p(s) over [0, 1] with u read
    /// through the given interpolant (negative cubic overshoot counts as 0).
    /// Throws KernelError when u has a negative sample or p leaves (0, inf).
    double nonlocal_value(const GridFunction& u, const Expression& p,
                          Interpolation interpolation = Interpolation::Linear) const;

private:
    Kernel(KernelKind kind, double order, std::optional<Expression> expr, quad::Settings settings);
    double compute_mass() const;

    KernelKind kind_;
    double order_ = 1.0;
    std::optional<Expression> expr_;
    quad::Settings settings_;
    double mass_ = 1.0;
};

}  // namespace kvge
