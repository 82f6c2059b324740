#include "kvge/varexp.hpp"

#include <cmath>
#include <limits>

namespace kvge {

namespace {

constexpr double kEnclosureTol = 1e-9;

void require(bool ok, const std::string& message) {
    if (!ok) throw VarexpError(message);
}

/// Golden-section minimization of f on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

void check_exponents(double p_minus, double p_plus) {
    require(p_minus > 0.0 && p_minus <= p_plus && std::isfinite(p_plus),
            "exponent bounds must satisfy 0 < p- <= p+ < inf");
}

double power_or_zero(double y, double e) { return y == 0.0 ? 0.0 : std::pow(y, e); }

}  // namespace

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::Convex: return "convex";
        case Regime::Concave: return "concave";
        case Regime::Mixed: return "mixed";
    }
    return "?";
}

Regime classify(double p_minus, double p_plus) {
    check_exponents(p_minus, p_plus);
    if (p_minus > 1.0) return Regime::Convex;
    if (p_plus <= 1.0) return Regime::Concave;
    return Regime::Mixed;
}

ExponentBounds extract_bounds(const Expression& p, int grid_intervals) {
    require(grid_intervals >= 2, "extract_bounds: grid too coarse");
    auto eval = [&](double t) {
        try {
            return p(t);
        } catch (const ExprError& e) {
            throw VarexpError("exponent p(t) cannot be evaluated at t=" + std::to_string(t) + ": " + e.what());
        }
    };
    const double h = 1.0 / grid_intervals;
    int i_min = 0;
    int i_max = 0;
    double v_min = std::numeric_limits<double>::infinity();
    double v_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid_intervals; ++i) {
        const double v = eval(i * h);
        if (v < v_min) {
            v_min = v;
            i_min = i;
        }
        if (v > v_max) {
            v_max = v;
            i_max = i;
        }
    }
    auto bracket = [&](int i) {
        return std::pair{std::max(i - 1, 0) * h, std::min(i + 1, grid_intervals) * h};
    };
    const auto [a1, b1] = bracket(i_min);
    v_min = std::min(v_min, golden_min(eval, a1, b1).second);
    const auto [a2, b2] = bracket(i_max);
    v_max = std::max(v_max, -golden_min([&](double t) { return -eval(t); }, a2, b2).second);
    require(v_min > 0.0, "exponent p(t) must be positive on [0,1], minimum is " + std::to_string(v_min));
    return {v_min, v_max};
}

ExponentProfile::ExponentProfile(Expression p, std::optional<ExponentBounds> override_bounds)
    : p_(std::move(p)), computed_(extract_bounds(p_)), bounds_(computed_) {
    if (override_bounds) {
        check_exponents(override_bounds->p_minus, override_bounds->p_plus);
        require(override_bounds->p_minus <= computed_.p_minus + kEnclosureTol,
                "p_minus override " + std::to_string(override_bounds->p_minus) + " exceeds min p = " +
                    std::to_string(computed_.p_minus));
        require(override_bounds->p_plus >= computed_.p_plus - kEnclosureTol,
                "p_plus override " + std::to_string(override_bounds->p_plus) + " is below max p = " +
                    std::to_string(computed_.p_plus));
        bounds_ = *override_bounds;
        overridden_ = true;
    }
    regime_ = classify(bounds_.p_minus, bounds_.p_plus);
}

double eps(double rho, double mass, double p_minus, double p_plus) {
    require(rho > 0.0 && mass > 0.0, "eps: rho and mass must be positive");
    check_exponents(p_minus, p_plus);
    const double ratio = rho / mass;
    const double hi = std::pow(ratio, 1.0 / p_plus);
    if (hi >= 1.0) return 0.0;
    return std::pow(ratio, 1.0 / p_minus) - hi;
}

double m_rho(double rho, double mass, double p_minus, double p_plus) {
    require(rho > 0.0 && mass > 0.0, "m_rho: rho and mass must be positive");
    check_exponents(p_minus, p_plus);
    const double ratio = rho / mass;
    if (p_minus == p_plus) return std::pow(ratio, 1.0 / p_plus);
    const double hi = std::pow(ratio, 1.0 / p_plus);
    return hi < 1.0 ? std::pow(ratio, 1.0 / p_minus) : hi;
}

double M_rho_convex(double rho, double holder_norm, double q, double p_minus, double p_plus, double c0) {
    check_exponents(p_minus, p_plus);
    require(q > 1.0 && q < p_minus,
            "M_rho: q=" + std::to_string(q) + " must lie in (1, p-) = (1, " + std::to_string(p_minus) + ")");
    require(std::isfinite(holder_norm) && holder_norm > 0.0,
            "M_rho: the kernel power b^(1/(1-q)) is not integrable at q=" + std::to_string(q));
    require(rho > 0.0 && c0 > 0.0, "M_rho: rho and C0 must be positive");
    const double bracket = std::pow(rho, 1.0 / q) * std::pow(holder_norm, (q - 1.0) / q) + 1.0;
    return std::pow(2.0, (p_plus - q) / p_minus) * std::pow(bracket, q / p_minus) / c0;
}

double M_star(double rho, double p_minus, double p_plus, double c0) {
    check_exponents(p_minus, p_plus);
    require(rho >= 0.0 && c0 > 0.0, "M_star: rho must be nonnegative and C0 positive");
    const double scale = p_minus == p_plus ? 1.0 : std::pow(2.0, (p_plus - p_minus) / p_minus);
    return scale * (std::pow(rho, 1.0 / p_minus) + 1.0) / c0;
}

double M_bar(double rho, double holder_norm, double q, double p_minus, double eta0, double alpha, double beta) {
    require(p_minus > 0.0, "M_bar: p- must be positive");
    require(q > 1.0, "M_bar: q must exceed 1");
    require(std::isfinite(holder_norm) && holder_norm > 0.0,
            "M_bar: the kernel power b^(1/(1-q)) is not integrable at q=" + std::to_string(q));
    require(rho >= 0.0 && eta0 > 0.0 && beta > alpha, "M_bar: need rho >= 0, eta0 > 0, beta > alpha");
    const double bracket = std::pow(rho, 1.0 / q) * std::pow(holder_norm, (q - 1.0) / q) + 1.0;
    return std::pow(beta - alpha, -q / p_minus) * std::pow(bracket, q / p_minus) / eta0;
}

double phi(double q, double rho, double p_minus, double p_plus, double c0) {
    check_exponents(p_minus, p_plus);
    require(q > 1.0 && q < p_minus, "phi: q must lie in (1, p-)");
    require(rho > 0.0 && c0 > 0.0, "phi: rho and C0 must be positive");
    return std::pow(2.0, (p_plus - q) / p_minus) * std::pow(std::pow(rho, 1.0 / q) + 1.0, q / p_minus) / c0;
}

PointwiseBound pointwise_convex(double y, double p_t, double q, double p_minus, double p_plus) {
    check_exponents(p_minus, p_plus);
    require(y >= 0.0, "pointwise bound: y must be nonnegative");
    require(p_minus > 1.0 && p_t >= p_minus && p_t <= p_plus, "pointwise_convex: need 1 < p- <= p(t) <= p+");
    require(q >= 1.0 && q < p_minus, "pointwise_convex: need 1 <= q < p-");
    return {power_or_zero(y, p_t / q), std::pow(2.0, 1.0 - p_plus / q) * power_or_zero(y, p_minus / q) - 1.0,
            std::nullopt};
}

PointwiseBound pointwise_concave(double y, double p_t, double q, double p_minus, double p_plus) {
    check_exponents(p_minus, p_plus);
    require(y >= 0.0, "pointwise bound: y must be nonnegative");
    require(p_plus <= 1.0 && p_t >= p_minus && p_t <= p_plus, "pointwise_concave: need p- <= p(t) <= p+ <= 1");
    require(q >= 1.0, "pointwise_concave: need q >= 1");
    return {power_or_zero(y, p_t / q), power_or_zero(y, p_minus / q) - 1.0, std::nullopt};
}

PointwiseBound pointwise_mixed(double y, double p_t, double q, double p_minus, double p_plus) {
    check_exponents(p_minus, p_plus);
    require(y >= 0.0, "pointwise bound: y must be nonnegative");
    require(p_plus > 1.0 && p_t >= p_minus && p_t <= p_plus, "pointwise_mixed: need p- <= p(t) <= p+, p+ > 1");
    require(q >= 1.0 && q < p_plus, "pointwise_mixed: need 1 <= q < p+");
    const double upper = std::pow(2.0, p_plus / q - 1.0) * (power_or_zero(y, p_plus / q) + 1.0);
    return {power_or_zero(y, p_t / q), power_or_zero(y, p_minus / q) - 1.0, upper};
}

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::ConvexM: return "M";
        case BoundKind::ConcaveMixedMbar: return "M_bar";
        case BoundKind::SpecialMstar: return "M_star";
    }
    return "?";
}

RhoBounds rho_bounds(double rho, BoundKind kind, const BoundContext& ctx) {
    RhoBounds out;
    out.rho = rho;
    out.bound_kind = kind;
    out.eps = ctx.p_minus == ctx.p_plus ? 0.0 : eps(rho, ctx.mass, ctx.p_minus, ctx.p_plus);
    out.m_rho = m_rho(rho, ctx.mass, ctx.p_minus, ctx.p_plus);
    switch (kind) {
        case BoundKind::ConvexM:
            out.q_used = ctx.q;
            out.M_upper = M_rho_convex(rho, ctx.holder_norm, ctx.q, ctx.p_minus, ctx.p_plus, ctx.c0);
            break;
        case BoundKind::ConcaveMixedMbar:
            out.q_used = ctx.q;
            out.M_upper = M_bar(rho, ctx.holder_norm, ctx.q, ctx.p_minus, ctx.eta0, ctx.alpha, ctx.beta);
            break;
        case BoundKind::SpecialMstar:
            out.q_used = ctx.p_minus;
            out.M_upper = M_star(rho, ctx.p_minus, ctx.p_plus, ctx.c0);
            break;
    }
    return out;
}

double default_q_convex(const Kernel& kernel, double p_minus) {
    for (int k = 1;; ++k) {
        const double q = p_minus - k * 1e-3;
        if (q <= 1.0) break;
        if (std::isfinite(kernel.reverse_holder_norm(q))) return q;
    }
    throw VarexpError("no q in (1, p-) makes the kernel power b^(1/(1-q)) integrable");
}

double default_q_bar(const Kernel& kernel, Regime regime, double rho2, double p_minus, double p_plus, double eta0,
                     double alpha, double beta) {
    require(regime != Regime::Convex, "default_q_bar applies to the concave and mixed regimes");
    const double cap = regime == Regime::Mixed ? p_plus - 1e-3 : 10.0;
    require(cap > 1.0, "no admissible q in (1, p+)");
    auto bound = [&](double q) {
        const double h = kernel.reverse_holder_norm(q);
        if (!std::isfinite(h)) return std::numeric_limits<double>::infinity();
        return M_bar(rho2, h, q, p_minus, eta0, alpha, beta);
    };
    double best_q = 0.0;
    double best = std::numeric_limits<double>::infinity();
    auto scan = [&](double lo, double hi, double step) {
        const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
        for (int k = 0; k <= n; ++k) {
            const double q = lo + k * step;
            if (q <= 1.0 || q > cap) continue;
            const double v = bound(q);
            if (v < best) {
                best = v;
                best_q = q;
            }
        }
    };
    scan(1.0 + 1e-3, cap, 0.05);
    if (best_q > 0.0) scan(std::max(1.0 + 1e-3, best_q - 0.05), std::min(cap, best_q + 0.05), 1e-3);
    if (cap - 1.0 < 0.05) scan(1.0 + 1e-3, cap, 1e-3);
    require(best_q > 0.0, "no admissible q makes the kernel power b^(1/(1-q)) integrable");
    return best_q;
}

}  // namespace kvge
