#include "kvge/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kvge {

namespace {

constexpr double kExpressionGrading = 4.0;
constexpr double kDivergenceGrowth = 1.5;
constexpr int kDivergenceStreak = 4;

void check_range(double lo, double hi) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
        throw KernelError("integration range must satisfy 0 <= lo <= hi <= 1");
}

/// Integral of h over [0, 1] on two-sided graded meshes regenerated with
/// twice the panels at each level. Returns +inf when the estimates grow
/// geometrically, which is how non-integrable endpoint singularities show up.
template <class F>
double graded_integral_or_divergence(F&& h, const quad::Settings& s, const std::string& what) {
    auto estimate = [&](int level) {
        const auto mesh = quad::two_sided_graded_mesh(s.base_panels << level, kExpressionGrading);
        return quad::composite(h, mesh);
    };
    double previous = estimate(0);
    if (!std::isfinite(previous)) return std::numeric_limits<double>::infinity();
    int streak = 0;
    for (int level = 1; level <= s.max_levels; ++level) {
        const double current = estimate(level);
        if (!std::isfinite(current)) return std::numeric_limits<double>::infinity();
        if (quad::converged(previous, current, s)) return current;
        streak = (previous > 0.0 && current > kDivergenceGrowth * previous) ? streak + 1 : 0;
        if (streak >= kDivergenceStreak) return std::numeric_limits<double>::infinity();
        previous = current;
    }
    throw KernelError(what + ": quadrature did not converge");
}

}  // namespace

Kernel::Kernel(KernelKind kind, double order, std::optional<Expression> expr, quad::Settings settings)
    : kind_(kind), order_(order), expr_(std::move(expr)), settings_(settings) {
    mass_ = compute_mass();
    if (!(mass_ > 0.0) || !std::isfinite(mass_))
        throw KernelError("kernel mass (b*1)(1) must be positive and finite, got " + std::to_string(mass_));
}

Kernel Kernel::constant_one(quad::Settings settings) {
    return Kernel(KernelKind::ConstantOne, 1.0, std::nullopt, settings);
}

Kernel Kernel::riemann_liouville(double order, quad::Settings settings) {
    if (!(order > 0.0 && order < 1.0))
        throw KernelError("Riemann-Liouville order must lie in (0, 1), got " + std::to_string(order));
    return Kernel(KernelKind::RiemannLiouville, order, std::nullopt, settings);
}

Kernel Kernel::from_expression(const Expression& b, quad::Settings settings) {
    if (b.variables().size() != 1 || b.variables().front() != "t")
        throw KernelError("kernel expression must be in the single variable t");
    constexpr int kSamples = 1000;
    for (int k = 1; k <= kSamples; ++k) {
        const double t = static_cast<double>(k) / kSamples;
        double v = 0.0;
        try {
            v = b(t);
        } catch (const ExprError& e) {
            throw KernelError("kernel b(t) cannot be evaluated at t=" + std::to_string(t) + ": " + e.what());
        }
        if (v < 0.0)
            throw KernelError("kernel b(t) is negative at t=" + std::to_string(t) + " (b must be nonnegative)");
    }
    return Kernel(KernelKind::Expression, 1.0, b, settings);
}

std::string Kernel::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case KernelKind::ConstantOne: out << "constant_one"; break;
        case KernelKind::RiemannLiouville: out << "riemann_liouville(order=" << order_ << ")"; break;
        case KernelKind::Expression: out << "expression(b(t)=" << expr_->source() << ")"; break;
    }
    return out.str();
}

double Kernel::operator()(double t) const {
    switch (kind_) {
        case KernelKind::ConstantOne: return 1.0;
        case KernelKind::RiemannLiouville: return std::pow(t, order_ - 1.0) / std::tgamma(order_);
        case KernelKind::Expression: return (*expr_)(t);
    }
    return 0.0;
}

double Kernel::compute_mass() const {
    switch (kind_) {
        case KernelKind::ConstantOne: return 1.0;
        case KernelKind::RiemannLiouville: return 1.0 / std::tgamma(order_ + 1.0);
        case KernelKind::Expression: {
            const Expression& b = *expr_;
            try {
                return graded_integral_or_divergence([&](double t) { return b(t); }, settings_, "kernel mass");
            } catch (const ExprError& e) {
                throw KernelError(std::string("kernel mass: ") + e.what());
            }
        }
    }
    return 0.0;
}

double Kernel::reverse_holder_norm(double q) const {
    if (!(q > 1.0)) throw KernelError("reverse Hoelder exponent q must exceed 1, got " + std::to_string(q));
    switch (kind_) {
        case KernelKind::ConstantOne: return 1.0;
        case KernelKind::RiemannLiouville: {
            // b^(1/(1-q)) = Gamma(order)^(1/(q-1)) t^((1-order)/(q-1)), always integrable.
            const double power = (1.0 - order_) / (q - 1.0);
            return std::pow(std::tgamma(order_), 1.0 / (q - 1.0)) / (1.0 + power);
        }
        case KernelKind::Expression: {
            const Expression& b = *expr_;
            const double exponent = 1.0 / (1.0 - q);
            auto h = [&](double t) {
                const double v = b(t);
                if (v == 0.0) return std::numeric_limits<double>::infinity();
                return std::pow(v, exponent);
            };
            try {
                return graded_integral_or_divergence(h, settings_, "reverse Hoelder norm");
            } catch (const ExprError& e) {
                throw KernelError(std::string("reverse Hoelder norm: ") + e.what());
            }
        }
    }
    return 0.0;
}

double Kernel::weighted_integral(const std::function<double(double)>& g, double lo, double hi,
                                 std::span<const double> breakpoints) const {
    check_range(lo, hi);
    if (lo == hi) return 0.0;
    const quad::Settings& s = settings_;

    if (kind_ != KernelKind::RiemannLiouville) {
        const auto mesh = quad::merge_breakpoints(quad::uniform_mesh(s.base_panels, lo, hi), breakpoints);
        std::function<double(double)> integrand;
        if (kind_ == KernelKind::ConstantOne) {
            integrand = g;
        } else {
            const Expression& b = *expr_;
            integrand = [&](double x) { return b(1.0 - x) * g(x); };
        }
        return quad::refine([&](int level) { return quad::composite(integrand, mesh, 1 << level); }, s,
                            "kernel integral")
            .value;
    }

    // Work in the distance x = 1 - s to the singular end, where b(x) = x^(order-1)/Gamma(order).
    const double alpha = order_;
    const double gamma = std::tgamma(alpha);
    const double x_lo = 1.0 - hi;
    const double x_hi = 1.0 - lo;
    std::vector<double> mapped;
    mapped.reserve(breakpoints.size());
    for (double bp : breakpoints) mapped.push_back(1.0 - bp);
    const auto mesh = quad::merge_breakpoints(quad::graded_mesh(s.base_panels, x_lo, x_hi, 2.0 / alpha), mapped);

    auto regular = [&](double x) { return std::pow(x, alpha - 1.0) / gamma * g(1.0 - x); };
    // On [0, x1]: x = y^(1/alpha) turns x^(alpha-1) dx into dy / alpha.
    auto substituted = [&](double y) { return g(1.0 - std::pow(y, 1.0 / alpha)) / (alpha * gamma); };
    const bool singular_end = x_lo == 0.0;

    auto estimate = [&](int level) {
        const int sub = 1 << level;
        double total = 0.0;
        std::size_t first = 0;
        if (singular_end) {
            const double y1 = std::pow(mesh[1], alpha);
            const double y_mesh[2] = {0.0, y1};
            total += quad::composite(substituted, std::span<const double>(y_mesh, 2), sub);
            first = 1;
        }
        total += quad::composite(regular, std::span<const double>(mesh).subspan(first), sub);
        return total;
    };
    return quad::refine(estimate, s, "Riemann-Liouville integral").value;
}

double Kernel::tail_mass(double lo, double hi) const {
    check_range(lo, hi);
    switch (kind_) {
        case KernelKind::ConstantOne: return hi - lo;
        case KernelKind::RiemannLiouville: {
            // integral of (1-s)^(order-1)/Gamma(order) = [(1-lo)^order - (1-hi)^order] / Gamma(order+1)
            return (std::pow(1.0 - lo, order_) - std::pow(1.0 - hi, order_)) / std::tgamma(order_ + 1.0);
        }
        case KernelKind::Expression: return weighted_integral([](double) { return 1.0; }, lo, hi);
    }
    return 0.0;
}

double Kernel::nonlocal_value(const GridFunction& u, const Expression& p, Interpolation interpolation) const {
    const auto values = u.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0)
            throw KernelError("nonlocal value: u is negative at node " + std::to_string(i) + " (t=" +
                              std::to_string(u.node(i)) + ")");
    }
    auto g = [&](double s) {
        const double exponent = p(s);
        if (!(exponent > 0.0) || !std::isfinite(exponent))
            throw KernelError("nonlocal value: exponent p(" + std::to_string(s) + ")=" + std::to_string(exponent) +
                              " is outside (0, inf)");
        const double base = interpolation == Interpolation::Linear ? u(s) : std::max(u.cubic(s), 0.0);
        return base == 0.0 ? 0.0 : std::pow(base, exponent);
    };
    const auto nodes = u.nodes();
    return weighted_integral(g, 0.0, 1.0, nodes);
}

}  // namespace kvge
