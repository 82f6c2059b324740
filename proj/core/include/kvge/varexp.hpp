#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "kvge/expr.hpp"
#include "kvge/kernel.hpp"

namespace kvge {

class VarexpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Convex: 1 < p- <= p+.  Concave: 0 < p- <= p+ <= 1.  Mixed: p- <= 1 < p+.
///
/// The boundary case p- = 1 < p+ is classified as Mixed: the two-sided
/// pointwise bound used there holds for any p- > 0.
enum class Regime { Convex, Concave, Mixed };

std::string to_string(Regime regime);
Regime classify(double p_minus, double p_plus);

struct ExponentBounds {
    double p_minus = 0.0;
    double p_plus = 0.0;
};

/// min and max of p over [0,1]: a 10^5-interval grid scan followed by
/// golden-section refinement around the extremal nodes. Throws VarexpError
/// if p cannot be evaluated or p(t) <= 0 somewhere.
ExponentBounds extract_bounds(const Expression& p, int grid_intervals = 100000);

/// The exponent p(t) with the bounds used by the theory. By default the
/// bounds are the extrema over [0,1]; an override must enclose them (up to
/// 1e-9) but may be wider.
class ExponentProfile {
public:
    explicit ExponentProfile(Expression p, std::optional<ExponentBounds> override_bounds = std::nullopt);

    const Expression& p() const noexcept { return p_; }
    double p_minus() const noexcept { return bounds_.p_minus; }
    double p_plus() const noexcept { return bounds_.p_plus; }
    /// Extrema of p over [0,1], regardless of any override.
    const ExponentBounds& computed() const noexcept { return computed_; }
    bool overridden() const noexcept { return overridden_; }
    Regime regime() const noexcept { return regime_; }
    bool is_constant() const noexcept { return bounds_.p_minus == bounds_.p_plus; }

private:
    Expression p_;
    ExponentBounds computed_;
    ExponentBounds bounds_;
    bool overridden_ = false;
    Regime regime_;
};

/// Correction term of the lower norm bound on the level set at rho.
double eps(double rho, double mass, double p_minus, double p_plus);

/// (rho/mass)^(1/p+) + eps(rho, mass, p-, p+). When p- = p+ the correction
/// is dropped exactly instead of relying on cancellation.
double m_rho(double rho, double mass, double p_minus, double p_plus);

/// C0^-1 2^((p+ - q)/p-) [rho^(1/q) H^((q-1)/q) + 1]^(q/p-), H the reverse
/// Hoelder norm of the kernel at q. Requires 1 < q < p- and finite H.
double M_rho_convex(double rho, double holder_norm, double q, double p_minus, double p_plus, double c0);

/// C0^-1 2^((p+ - p-)/p-) (rho^(1/p-) + 1), the q -> p- limit for b = 1.
double M_star(double rho, double p_minus, double p_plus, double c0);

/// eta0^-1 (beta - alpha)^(-q/p-) [rho^(1/q) H^((q-1)/q) + 1]^(q/p-).
double M_bar(double rho, double holder_norm, double q, double p_minus, double eta0, double alpha, double beta);

/// C0^-1 2^((p+ - q)/p-) (rho^(1/q) + 1)^(q/p-) for 1 < q < p-.
double phi(double q, double rho, double p_minus, double p_plus, double c0);

/// A pointwise inequality instance: `lower <= value` and, when present,
/// `value < upper`, where value = y^(p_t/q).
struct PointwiseBound {
    double value = 0.0;
    double lower = 0.0;
    std::optional<double> upper;
};

/// Convex regime, 1 <= q < p-: y^(p_t/q) >= 2^(1 - p+/q) y^(p-/q) - 1.
PointwiseBound pointwise_convex(double y, double p_t, double q, double p_minus, double p_plus);
/// Concave regime, q >= 1: y^(p_t/q) >= y^(p-/q) - 1.
PointwiseBound pointwise_concave(double y, double p_t, double q, double p_minus, double p_plus);
/// Mixed regime, 1 <= q < p+:
/// y^(p-/q) - 1 <= y^(p_t/q) < 2^(p+/q - 1) (y^(p+/q) + 1).
PointwiseBound pointwise_mixed(double y, double p_t, double q, double p_minus, double p_plus);

enum class BoundKind { ConvexM, ConcaveMixedMbar, SpecialMstar };

std::string to_string(BoundKind kind);

/// Everything the norm bounds depend on besides rho.
struct BoundContext {
    double mass = 1.0;
    double holder_norm = 1.0;
    double q = 2.0;
    double p_minus = 1.0;
    double p_plus = 1.0;
    double c0 = 0.5;
    double eta0 = 0.25;
    double alpha = 0.25;
    double beta = 0.75;
};

struct RhoBounds {
    double rho = 0.0;
    double eps = 0.0;
    double m_rho = 0.0;
    double M_upper = 0.0;
    double q_used = 0.0;
    BoundKind bound_kind = BoundKind::ConvexM;
};

RhoBounds rho_bounds(double rho, BoundKind kind, const BoundContext& ctx);

/// Largest q on the grid p- - k 10^-3 (k >= 1, q > 1) whose reverse Hoelder
/// norm is finite. Throws VarexpError if there is none.
double default_q_convex(const Kernel& kernel, double p_minus);

/// q in (1, cap] minimizing M_bar(rho2): a 0.05-spaced scan followed by a
/// 10^-3-spaced scan around the best coarse point. The cap is p+ - 10^-3 in
/// the mixed regime and 10 in the concave regime.
double default_q_bar(const Kernel& kernel, Regime regime, double rho2, double p_minus, double p_plus, double eta0,
                     double alpha, double beta);

}  // namespace kvge
