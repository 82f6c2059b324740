#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvge/expr.hpp"
#include "kvge/green.hpp"
#include "kvge/kernel.hpp"
#include "kvge/varexp.hpp"

namespace kvge {

class CertifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested theorem does not apply to the exponent regime or kernel.
class RegimeMismatchError : public CertifyError {
public:
    using CertifyError::CertifyError;
};

/// Convex general kernel (T2_8), concave (T3_6), mixed (T4_4), and the
/// convex b = 1 specializations with the bound M* (C2_10) and additionally
/// constant exponent (C2_11).
enum class Theorem { Auto, T2_8, T3_6, T4_4, C2_10, C2_11 };

std::string to_string(Theorem theorem);
/// Accepts auto, t2.8, t3.6, t4.4, c2.10, c2.11.
Theorem parse_theorem(const std::string& text);

struct ProblemSpec {
    Expression A;  // nonlocal coefficient, variable t
    Expression f;  // forcing, variables (t, u)
    ExponentProfile p;
    Kernel kernel;
    BoundaryModel boundary;
    double lambda = 1.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    std::optional<double> q;
};

/// Throws CertifyError unless 0 < rho1 < rho2, lambda >= 0 and the
/// expressions use the expected variables.
void validate(const ProblemSpec& spec);

struct CertifyOptions {
    Theorem theorem = Theorem::Auto;
    /// Both conditions must hold with this relative slack:
    /// lhs1 > rhs1 (1 + margin) and lhs2 (1 + margin) < rhs2.
    double margin = 0.0;
    int grid_res = 201;
    int positivity_samples = 1000;
};

/// The rectangle [t_lo, t_hi] x [u_lo, u_hi] and the extremum of f on it.
struct FBox {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double u_lo = 0.0;
    double u_hi = 0.0;
    double value = 0.0;
};

enum class Extremum { Min, Max };

/// Extremum of f over the box: a grid_res x grid_res scan, then three rounds
/// of 5x finer local grids around the incumbent.
/// Throws CertifyError when the box is empty or f is negative or undefined on it.
FBox extremal_f(const Expression& f, double t_lo, double t_hi, double u_lo, double u_hi, Extremum mode,
                int grid_res = 201);

struct LambdaWindow {
    double lambda_min = 0.0;
    double lambda_max = 0.0;  // may be +inf when f^M = 0
};

struct Certificate {
    Theorem theorem = Theorem::Auto;
    Regime regime = Regime::Convex;
    BoundKind bound_kind = BoundKind::ConvexM;

    double lambda = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double p_minus = 0.0;
    double p_plus = 0.0;
    double margin = 0.0;

    double eta0 = 0.0;
    double c0 = 0.0;
    C0Mode c0_mode = C0Mode::CoerciveInf;
    double gm = 0.0;
    double partial_gm = 0.0;
    double mass = 0.0;
    double holder_norm = 0.0;
    double q = 0.0;
    /// integral over [alpha, beta] of b(1 - t).
    double inner_mass = 0.0;

    RhoBounds bounds_rho1;
    RhoBounds bounds_rho2;

    FBox f_min_box;
    FBox f_max_box;
    double A_rho1 = 0.0;
    double A_rho2 = 0.0;
    double A_min_sampled = 0.0;
    bool positivity_ok = false;

    double condition1_lhs = 0.0;
    double condition1_rhs = 0.0;
    bool condition1_ok = false;
    /// Mixed regime only: condition (1) with the "-1" term kept inside the
    /// bracket, compared against the same right-hand side.
    std::optional<double> condition1_variant_lhs;
    std::optional<bool> condition1_variant_ok;

    /// x = lambda f^M G^M / A(rho2); both branches x^p- and x^p+ are kept.
    double condition2_x = 0.0;
    double condition2_branch_minus = 0.0;
    double condition2_branch_plus = 0.0;
    double condition2_lhs = 0.0;
    double condition2_rhs = 0.0;
    bool condition2_ok = false;

    bool pass = false;
    std::optional<LambdaWindow> lambda_window;
    double localization_lower = 0.0;
    double localization_upper = 0.0;
};

/// Theorem selected by `auto`: convex with b = 1 uses C2_11 when p- = p+ and
/// C2_10 otherwise; other convex kernels use T2_8; concave uses T3_6; mixed
/// uses T4_4.
Theorem select_theorem(const ProblemSpec& spec);

/// Throws RegimeMismatchError unless `theorem` applies to the regime and
/// kernel of `spec`. Auto always applies.
void require_theorem_applies(const ProblemSpec& spec, Theorem theorem);

/// Convex regime. `bound` is ConvexM for the general theorem; SpecialMstar
/// evaluates the same conditions with the b = 1 bound M*.
Certificate check_theorem_2_8(const ProblemSpec& spec, const CertifyOptions& options = {},
                              BoundKind bound = BoundKind::ConvexM);
Certificate check_theorem_3_6(const ProblemSpec& spec, const CertifyOptions& options = {});
Certificate check_theorem_4_4(const ProblemSpec& spec, const CertifyOptions& options = {});
Certificate check_corollary_2_10(const ProblemSpec& spec, const CertifyOptions& options = {});
Certificate check_corollary_2_11(const ProblemSpec& spec, const CertifyOptions& options = {});

/// Dispatches on options.theorem (resolving Auto).
Certificate certify(const ProblemSpec& spec, const CertifyOptions& options = {});

/// Closed-form inversion of both conditions in lambda with the f boxes held
/// fixed; empty when lambda_min >= lambda_max. Throws CertifyError when
/// f^M < f^m, which no consistent pair of boxes can produce.
std::optional<LambdaWindow> lambda_window(const Certificate& certificate);

/// The bounds used for the boxes and the localization of `theorem`.
BoundContext bound_context(const ProblemSpec& spec, Theorem theorem);

}  // namespace kvge
