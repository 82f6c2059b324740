#include "kvge/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kvge {

namespace {

enum class Form { Convex, Concave, Mixed };

Form form_of(Theorem theorem) {
    switch (theorem) {
        case Theorem::T3_6: return Form::Concave;
        case Theorem::T4_4: return Form::Mixed;
        default: return Form::Convex;
    }
}

double eval_A(const Expression& A, double z) {
    try {
        return A(z);
    } catch (const ExprError& e) {
        throw CertifyError("A(" + std::to_string(z) + ") cannot be evaluated: " + e.what());
    }
}

Certificate evaluate(const ProblemSpec& spec, const CertifyOptions& options, Theorem theorem, BoundKind bound) {
    validate(spec);
    if (!(options.margin >= 0.0) || !std::isfinite(options.margin))
        throw CertifyError("margin must be a finite nonnegative number");
    require_theorem_applies(spec, theorem);

    const BoundaryModel& g = spec.boundary;
    const BoundContext ctx = bound_context(spec, theorem);

    Certificate c;
    c.theorem = theorem;
    c.regime = spec.p.regime();
    c.bound_kind = bound;
    c.lambda = spec.lambda;
    c.rho1 = spec.rho1;
    c.rho2 = spec.rho2;
    c.p_minus = ctx.p_minus;
    c.p_plus = ctx.p_plus;
    c.margin = options.margin;
    c.eta0 = g.eta0();
    c.c0 = g.c0();
    c.c0_mode = g.c0_mode();
    c.gm = g.gm();
    c.partial_gm = g.partial_gm();
    c.mass = ctx.mass;
    c.holder_norm = ctx.holder_norm;
    c.q = ctx.q;
    c.inner_mass = spec.kernel.tail_mass(g.alpha(), g.beta());

    c.bounds_rho1 = rho_bounds(spec.rho1, bound, ctx);
    c.bounds_rho2 = rho_bounds(spec.rho2, bound, ctx);
    c.localization_lower = c.bounds_rho1.m_rho;
    c.localization_upper = c.bounds_rho2.M_upper;

    // Positivity of A on [rho1, rho2]: the endpoints and `positivity_samples` interior points.
    c.A_rho1 = eval_A(spec.A, spec.rho1);
    c.A_rho2 = eval_A(spec.A, spec.rho2);
    c.A_min_sampled = std::min(c.A_rho1, c.A_rho2);
    const int n = std::max(options.positivity_samples, 0);
    for (int k = 1; k <= n; ++k) {
        const double z = spec.rho1 + (spec.rho2 - spec.rho1) * k / (n + 1.0);
        c.A_min_sampled = std::min(c.A_min_sampled, eval_A(spec.A, z));
    }
    c.positivity_ok = c.A_min_sampled > 0.0;

    const double u_lo = c.eta0 * c.bounds_rho1.m_rho;
    if (u_lo > c.bounds_rho1.M_upper)
        throw CertifyError("empty f^m box: eta0 m_rho1 = " + std::to_string(u_lo) + " exceeds the upper bound " +
                           std::to_string(c.bounds_rho1.M_upper));
    c.f_min_box = extremal_f(spec.f, g.alpha(), g.beta(), u_lo, c.bounds_rho1.M_upper, Extremum::Min,
                             options.grid_res);
    c.f_max_box = extremal_f(spec.f, 0.0, 1.0, 0.0, c.bounds_rho2.M_upper, Extremum::Max, options.grid_res);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double pm = c.p_minus;
    const double pp = c.p_plus;
    const double y = c.A_rho1 > 0.0 ? spec.lambda * c.f_min_box.value * c.partial_gm / c.A_rho1 : nan;
    const double y_pm = std::pow(y, pm);
    switch (form_of(theorem)) {
        case Form::Convex:
            c.condition1_lhs = (std::pow(2.0, 1.0 - pp) * y_pm - 1.0) * c.inner_mass;
            c.condition1_rhs = spec.rho1 / std::pow(c.eta0, pp);
            break;
        case Form::Concave:
            c.condition1_lhs = (y_pm - 1.0) * c.inner_mass;
            c.condition1_rhs = spec.rho1 / std::pow(c.eta0, pp);
            break;
        case Form::Mixed:
            c.condition1_lhs = std::pow(c.eta0, pp) * y_pm * c.inner_mass;
            c.condition1_rhs = spec.rho1;
            c.condition1_variant_lhs = std::pow(c.eta0, pp) * (y_pm - 1.0) * c.inner_mass;
            c.condition1_variant_ok = *c.condition1_variant_lhs > c.condition1_rhs * (1.0 + options.margin);
            break;
    }
    c.condition1_ok = c.condition1_lhs > c.condition1_rhs * (1.0 + options.margin);

    c.condition2_x = c.A_rho2 > 0.0 ? spec.lambda * c.f_max_box.value * c.gm / c.A_rho2 : nan;
    c.condition2_branch_minus = std::pow(c.condition2_x, pm);
    c.condition2_branch_plus = std::pow(c.condition2_x, pp);
    const double branch_max = std::isnan(c.condition2_x)
                                  ? nan
                                  : std::max(c.condition2_branch_minus, c.condition2_branch_plus);
    if (form_of(theorem) == Form::Convex) {
        c.condition2_lhs = branch_max * c.mass;
        c.condition2_rhs = spec.rho2;
    } else {
        c.condition2_lhs = branch_max;
        c.condition2_rhs = spec.rho2 / c.mass;
    }
    c.condition2_ok = c.condition2_lhs * (1.0 + options.margin) < c.condition2_rhs;

    c.pass = c.condition1_ok && c.condition2_ok && c.positivity_ok;
    if (c.positivity_ok) c.lambda_window = lambda_window(c);
    return c;
}

}  // namespace

std::string to_string(Theorem theorem) {
    switch (theorem) {
        case Theorem::Auto: return "auto";
        case Theorem::T2_8: return "t2.8";
        case Theorem::T3_6: return "t3.6";
        case Theorem::T4_4: return "t4.4";
        case Theorem::C2_10: return "c2.10";
        case Theorem::C2_11: return "c2.11";
    }
    return "?";
}

Theorem parse_theorem(const std::string& text) {
    for (Theorem t : {Theorem::Auto, Theorem::T2_8, Theorem::T3_6, Theorem::T4_4, Theorem::C2_10, Theorem::C2_11}) {
        if (text == to_string(t)) return t;
    }
    throw CertifyError("unknown theorem '" + text + "' (expected auto, t2.8, t3.6, t4.4, c2.10 or c2.11)");
}

void validate(const ProblemSpec& spec) {
    if (spec.A.variables() != std::vector<std::string>{"t"})
        throw CertifyError("A must be an expression in the single variable t");
    if (spec.f.variables() != std::vector<std::string>{"t", "u"})
        throw CertifyError("f must be an expression in the variables (t, u)");
    if (!(spec.rho1 > 0.0) || !std::isfinite(spec.rho1)) throw CertifyError("rho1 must be positive");
    if (!(spec.rho2 > spec.rho1) || !std::isfinite(spec.rho2)) throw CertifyError("rho2 must exceed rho1");
    if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) throw CertifyError("lambda must be nonnegative");
    if (spec.q && !(*spec.q > 1.0)) throw CertifyError("q must exceed 1");
}

FBox extremal_f(const Expression& f, double t_lo, double t_hi, double u_lo, double u_hi, Extremum mode,
                int grid_res) {
    if (!(t_lo <= t_hi) || !(u_lo <= u_hi))
        throw CertifyError("empty box [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) + "] x [" +
                           std::to_string(u_lo) + ", " + std::to_string(u_hi) + "]");
    if (grid_res < 2) throw CertifyError("grid resolution must be at least 2");
    auto eval = [&](double t, double u) {
        double v = 0.0;
        try {
            v = f(t, u);
        } catch (const ExprError& e) {
            throw CertifyError("f(" + std::to_string(t) + ", " + std::to_string(u) + ") cannot be evaluated: " +
                               e.what());
        }
        if (v < 0.0)
            throw CertifyError("f is negative at (t, u) = (" + std::to_string(t) + ", " + std::to_string(u) +
                               "); f must map into [0, inf)");
        return v;
    };
    const double sign = mode == Extremum::Max ? 1.0 : -1.0;
    double ht = (t_hi - t_lo) / (grid_res - 1);
    double hu = (u_hi - u_lo) / (grid_res - 1);
    double best = -std::numeric_limits<double>::infinity();
    double bt = t_lo;
    double bu = u_lo;
    auto consider = [&](double t, double u) {
        const double v = sign * eval(t, u);
        if (v > best) {
            best = v;
            bt = t;
            bu = u;
        }
    };
    for (int i = 0; i < grid_res; ++i) {
        const double t = i + 1 == grid_res ? t_hi : t_lo + i * ht;
        for (int j = 0; j < grid_res; ++j) consider(t, j + 1 == grid_res ? u_hi : u_lo + j * hu);
    }
    for (int round = 0; round < 3; ++round) {
        const double ct = bt;
        const double cu = bu;
        ht /= 5.0;
        hu /= 5.0;
        for (int i = -5; i <= 5; ++i) {
            const double t = std::clamp(ct + i * ht, t_lo, t_hi);
            for (int j = -5; j <= 5; ++j) consider(t, std::clamp(cu + j * hu, u_lo, u_hi));
        }
    }
    return {t_lo, t_hi, u_lo, u_hi, sign * best};
}

void require_theorem_applies(const ProblemSpec& spec, Theorem theorem) {
    const Regime regime = spec.p.regime();
    auto mismatch = [&](const std::string& why) {
        throw RegimeMismatchError("theorem " + to_string(theorem) + " does not apply: " + why + " (regime " +
                                  to_string(regime) + ", p-=" + std::to_string(spec.p.p_minus()) +
                                  ", p+=" + std::to_string(spec.p.p_plus()) + ")");
    };
    switch (theorem) {
        case Theorem::T2_8:
            if (regime != Regime::Convex) mismatch("it needs 1 < p-");
            break;
        case Theorem::C2_10:
            if (regime != Regime::Convex) mismatch("it needs 1 < p-");
            if (!spec.kernel.is_constant_one()) mismatch("it needs the kernel b = 1");
            break;
        case Theorem::C2_11:
            if (regime != Regime::Convex) mismatch("it needs 1 < p-");
            if (!spec.kernel.is_constant_one()) mismatch("it needs the kernel b = 1");
            if (!spec.p.is_constant()) mismatch("it needs p- = p+");
            break;
        case Theorem::T3_6:
            if (regime != Regime::Concave) mismatch("it needs p+ <= 1");
            break;
        case Theorem::T4_4:
            if (regime != Regime::Mixed) mismatch("it needs p- <= 1 < p+");
            break;
        case Theorem::Auto: break;
    }
}

Theorem select_theorem(const ProblemSpec& spec) {
    switch (spec.p.regime()) {
        case Regime::Convex:
            if (spec.kernel.is_constant_one()) return spec.p.is_constant() ? Theorem::C2_11 : Theorem::C2_10;
            return Theorem::T2_8;
        case Regime::Concave: return Theorem::T3_6;
        case Regime::Mixed: return Theorem::T4_4;
    }
    return Theorem::T2_8;
}

BoundContext bound_context(const ProblemSpec& spec, Theorem theorem) {
    if (theorem == Theorem::Auto) theorem = select_theorem(spec);
    const BoundaryModel& g = spec.boundary;
    BoundContext ctx;
    ctx.mass = spec.kernel.mass();
    ctx.p_minus = spec.p.p_minus();
    ctx.p_plus = spec.p.p_plus();
    ctx.c0 = g.c0();
    ctx.eta0 = g.eta0();
    ctx.alpha = g.alpha();
    ctx.beta = g.beta();
    auto finite_norm = [&](double q) {
        const double h = spec.kernel.reverse_holder_norm(q);
        if (!std::isfinite(h))
            throw CertifyError("the kernel power b^(1/(1-q)) is not integrable at q=" + std::to_string(q));
        return h;
    };
    switch (theorem) {
        case Theorem::C2_10:
        case Theorem::C2_11:
            ctx.q = ctx.p_minus;
            ctx.holder_norm = 1.0;
            break;
        case Theorem::T2_8:
            ctx.q = spec.q ? *spec.q : default_q_convex(spec.kernel, ctx.p_minus);
            if (!(ctx.q > 1.0 && ctx.q < ctx.p_minus))
                throw CertifyError("q=" + std::to_string(ctx.q) + " must lie in (1, p-)");
            ctx.holder_norm = finite_norm(ctx.q);
            break;
        case Theorem::T3_6:
        case Theorem::T4_4: {
            const Regime regime = theorem == Theorem::T3_6 ? Regime::Concave : Regime::Mixed;
            ctx.q = spec.q ? *spec.q
                           : default_q_bar(spec.kernel, regime, spec.rho2, ctx.p_minus, ctx.p_plus, ctx.eta0,
                                           ctx.alpha, ctx.beta);
            if (theorem == Theorem::T4_4 && !(ctx.q < ctx.p_plus))
                throw CertifyError("q=" + std::to_string(ctx.q) + " must lie in (1, p+)");
            ctx.holder_norm = finite_norm(ctx.q);
            break;
        }
        case Theorem::Auto: break;
    }
    return ctx;
}

Certificate check_theorem_2_8(const ProblemSpec& spec, const CertifyOptions& options, BoundKind bound) {
    if (bound == BoundKind::ConcaveMixedMbar)
        throw CertifyError("the convex conditions use the bound M or M*, not M_bar");
    Certificate c = evaluate(spec, options, bound == BoundKind::SpecialMstar ? Theorem::C2_10 : Theorem::T2_8,
                             bound);
    c.theorem = Theorem::T2_8;
    return c;
}

Certificate check_theorem_3_6(const ProblemSpec& spec, const CertifyOptions& options) {
    return evaluate(spec, options, Theorem::T3_6, BoundKind::ConcaveMixedMbar);
}

Certificate check_theorem_4_4(const ProblemSpec& spec, const CertifyOptions& options) {
    return evaluate(spec, options, Theorem::T4_4, BoundKind::ConcaveMixedMbar);
}

Certificate check_corollary_2_10(const ProblemSpec& spec, const CertifyOptions& options) {
    return evaluate(spec, options, Theorem::C2_10, BoundKind::SpecialMstar);
}

Certificate check_corollary_2_11(const ProblemSpec& spec, const CertifyOptions& options) {
    return evaluate(spec, options, Theorem::C2_11, BoundKind::SpecialMstar);
}

Certificate certify(const ProblemSpec& spec, const CertifyOptions& options) {
    const Theorem theorem = options.theorem == Theorem::Auto ? select_theorem(spec) : options.theorem;
    switch (theorem) {
        case Theorem::T2_8: return check_theorem_2_8(spec, options);
        case Theorem::T3_6: return check_theorem_3_6(spec, options);
        case Theorem::T4_4: return check_theorem_4_4(spec, options);
        case Theorem::C2_10: return check_corollary_2_10(spec, options);
        case Theorem::C2_11: return check_corollary_2_11(spec, options);
        case Theorem::Auto: break;
    }
    throw CertifyError("no theorem selected");
}

std::optional<LambdaWindow> lambda_window(const Certificate& c) {
    const double f_min = c.f_min_box.value;
    const double f_max = c.f_max_box.value;
    if (f_max < f_min * (1.0 - 1e-12))
        throw CertifyError("inconsistent boxes: f^M = " + std::to_string(f_max) + " < f^m = " + std::to_string(f_min));
    if (!(c.A_rho1 > 0.0) || !(c.A_rho2 > 0.0) || f_min <= 0.0) return std::nullopt;

    const double slack = 1.0 + c.margin;
    const double pm = c.p_minus;
    const double pp = c.p_plus;
    const double k = f_min * c.partial_gm / c.A_rho1;
    // Condition (1) becomes (lambda k)^p- > threshold.
    double threshold = 0.0;
    const double r1 = c.rho1 * slack / (std::pow(c.eta0, pp) * c.inner_mass);
    switch (c.theorem) {
        case Theorem::T3_6: threshold = 1.0 + r1; break;
        case Theorem::T4_4: threshold = r1; break;
        default: threshold = std::pow(2.0, pp - 1.0) * (1.0 + r1); break;
    }
    LambdaWindow w;
    w.lambda_min = std::pow(threshold, 1.0 / pm) / k;

    // Condition (2) becomes max(x^p-, x^p+) < r2 with x = lambda f^M G^M / A(rho2).
    const double r2 = c.rho2 / (slack * c.mass);
    const double x_star = r2 >= 1.0 ? std::pow(r2, 1.0 / pp) : std::pow(r2, 1.0 / pm);
    w.lambda_max = f_max > 0.0 ? x_star * c.A_rho2 / (f_max * c.gm) : std::numeric_limits<double>::infinity();
    if (!(w.lambda_min < w.lambda_max)) return std::nullopt;
    return w;
}

}  // namespace kvge
