#include "kvge/solve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace kvge {

namespace {

constexpr int kStallWindow = 100;
constexpr double kGrowthFactor = 2.0;
constexpr int kMaxBisections = 200;

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written by index, which keeps them independent of the schedule.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<double> scan_grid(double lo, double hi, int points) {
    std::vector<double> z(static_cast<std::size_t>(points));
    const double ratio = hi / lo;
    for (int k = 0; k < points; ++k) z[k] = lo * std::pow(ratio, static_cast<double>(k) / (points - 1));
    z.front() = lo;
    z.back() = hi;
    return z;
}

}  // namespace

DegenerateCoefficientError::DegenerateCoefficientError(double z, double a)
    : SolveError("degenerate coefficient: A(" + std::to_string(z) + ") = " + std::to_string(a) + " <= 0"), z_(z) {}

DivergenceError::DivergenceError(const std::string& message, double last_residual)
    : SolveError(message + " (last residual " + std::to_string(last_residual) + ")"),
      last_residual_(last_residual) {}

unsigned resolve_threads(unsigned requested) {
    unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("KVGE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

HammersteinOperator::HammersteinOperator(const ProblemSpec& spec, std::size_t n_nodes)
    : spec_(spec), n_(n_nodes), weighted_green_(n_nodes * n_nodes) {
    if (n_nodes < 3) throw SolveError("the collocation grid needs at least 3 nodes");
    const double h = 1.0 / static_cast<double>(n_ - 1);
    for (std::size_t i = 0; i < n_; ++i) {
        const double t = static_cast<double>(i) * h;
        for (std::size_t j = 0; j < n_; ++j) {
            const double w = (j == 0 || j + 1 == n_) ? 0.5 * h : h;
            weighted_green_[i * n_ + j] = w * spec_.boundary(t, static_cast<double>(j) * h);
        }
    }
}

double HammersteinOperator::coefficient(double z) const {
    double a = 0.0;
    try {
        a = spec_.A(z);
    } catch (const ExprError& e) {
        throw SolveError("A(" + std::to_string(z) + ") cannot be evaluated: " + e.what());
    }
    if (!(a > 0.0)) throw DegenerateCoefficientError(z, a);
    return a;
}

GridFunction HammersteinOperator::apply(const GridFunction& u, double z) const {
    if (u.size() != n_) throw SolveError("grid function size does not match the operator");
    const double scale = spec_.lambda / coefficient(z);
    const double h = 1.0 / static_cast<double>(n_ - 1);
    std::vector<double> forcing(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        const double s = static_cast<double>(j) * h;
        double v = 0.0;
        try {
            v = spec_.f(s, u[j]);
        } catch (const ExprError& e) {
            throw SolveError("f(" + std::to_string(s) + ", " + std::to_string(u[j]) + ") cannot be evaluated: " +
                             e.what());
        }
        if (v < 0.0)
            throw SolveError("f is negative at (t, u) = (" + std::to_string(s) + ", " + std::to_string(u[j]) + ")");
        forcing[j] = v;
    }
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = &weighted_green_[i * n_];
        double sum = 0.0;
        for (std::size_t j = 0; j < n_; ++j) sum += row[j] * forcing[j];
        out[i] = scale * sum;
    }
    return GridFunction(std::move(out));
}

GridFunction apply_T(const ProblemSpec& spec, const GridFunction& u, double z) {
    return HammersteinOperator(spec, u.size()).apply(u, z);
}

InnerResult inner_solve(const HammersteinOperator& op, double z, const GridFunction& u0, const SolveOptions& options) {
    op.coefficient(z);
    double omega = 1.0;
    GridFunction u = u0;
    GridFunction best_u = u0;
    double best = std::numeric_limits<double>::infinity();
    double residual = best;
    int since_improvement = 0;
    for (int it = 1; it <= options.max_iters; ++it) {
        GridFunction v = op.apply(u, z);
        residual = sup_distance(v.values(), u.values());
        if (residual <= options.tol_inner * std::max(1.0, v.sup_norm()))
            return {std::move(v), it - 1, residual, omega};
        if (residual < best) {
            best = residual;
            best_u = u;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        if (residual > kGrowthFactor * best || since_improvement >= kStallWindow) {
            omega *= 0.5;
            if (omega < options.omega_floor)
                throw DivergenceError("inner iteration stalled at z=" + std::to_string(z) +
                                          " even with damping " + std::to_string(options.omega_floor),
                                      residual);
            u = best_u;
            best = std::numeric_limits<double>::infinity();
            since_improvement = 0;
            continue;
        }
        std::vector<double> next(u.size());
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = (1.0 - omega) * u[i] + omega * v[i];
        u = GridFunction(std::move(next));
    }
    throw DivergenceError("inner iteration hit max_iters=" + std::to_string(options.max_iters) +
                              " at z=" + std::to_string(z),
                          residual);
}

InnerResult inner_solve(const ProblemSpec& spec, double z, const GridFunction& u0, const SolveOptions& options) {
    return inner_solve(HammersteinOperator(spec, u0.size()), z, u0, options);
}

ProfileChecks verify_profile(const ProblemSpec& spec, const GridFunction& u, double z_star, double lower,
                             double upper, const SolveOptions& options) {
    ProfileChecks c;
    try {
        const GridFunction v = apply_T(spec, u, z_star);
        c.residual_sup = sup_distance(u.values(), v.values());
    } catch (const std::exception&) {
        c.residual_sup = std::numeric_limits<double>::infinity();
    }
    const double norm = u.sup_norm();
    const double tol = options.cone_tol * std::max(1.0, norm);
    const auto values = u.values();
    const bool nonnegative = std::all_of(values.begin(), values.end(), [&](double x) { return x >= -tol; });
    const BoundaryModel& g = spec.boundary;
    c.cone_ok = nonnegative && u.min_on(g.alpha(), g.beta()) >= g.eta0() * norm - tol &&
                u.integral() >= g.c0() * norm - tol;
    c.localization_ok = norm >= lower - options.localization_tol && norm <= upper + options.localization_tol;
    c.annulus_ok = z_star > spec.rho1 && z_star < spec.rho2;
    return c;
}

double phi_of_z(const HammersteinOperator& op, double z, const GridFunction& u0, const SolveOptions& options,
                GridFunction* solution, int* iterations) {
    InnerResult r = inner_solve(op, z, u0, options);
    const ProblemSpec& spec = op.spec();
    double value = 0.0;
    try {
        value = spec.kernel.nonlocal_value(r.u, spec.p.p(), Interpolation::Cubic);
    } catch (const std::exception& e) {
        throw SolveError(std::string("nonlocal value at z=") + std::to_string(z) + ": " + e.what());
    }
    if (iterations) *iterations = r.iterations;
    if (solution) *solution = std::move(r.u);
    return value;
}

OuterResult outer_solve(const ProblemSpec& spec, const SolveOptions& options) {
    validate(spec);
    if (options.scan_points < 2) throw SolveError("scan_points must be at least 2");
    OuterResult result;

    const Theorem theorem = options.theorem == Theorem::Auto ? select_theorem(spec) : options.theorem;
    const BoundContext ctx = bound_context(spec, theorem);
    const BoundKind kind = theorem == Theorem::T3_6 || theorem == Theorem::T4_4 ? BoundKind::ConcaveMixedMbar
                           : theorem == Theorem::T2_8                          ? BoundKind::ConvexM
                                                                               : BoundKind::SpecialMstar;
    result.localization_lower = rho_bounds(spec.rho1, kind, ctx).m_rho;
    result.localization_upper = rho_bounds(spec.rho2, kind, ctx).M_upper;

    const HammersteinOperator op(spec, options.n_nodes);
    const GridFunction u0 = GridFunction::constant(options.n_nodes, result.localization_lower);
    const unsigned threads = resolve_threads(options.threads);

    auto g_of = [&](double z, ScanPoint& point) {
        point.z = z;
        try {
            point.g = phi_of_z(op, z, u0, options) - z;
        } catch (const DegenerateCoefficientError&) {
            point.skipped_reason = "A(z) <= 0";
        } catch (const SolveError& e) {
            point.skipped_reason = e.what();
        }
    };

    const auto zs = scan_grid(spec.rho1, spec.rho2, options.scan_points);
    result.scan.resize(zs.size());
    parallel_for(zs.size(), threads, [&](std::size_t k) { g_of(zs[k], result.scan[k]); });
    for (const auto& p : result.scan) {
        if (!p.g) result.warnings.push_back("skipped z=" + std::to_string(p.z) + ": " + p.skipped_reason);
    }

    struct Bracket {
        double a, b, ga, gb;
    };
    std::vector<Bracket> brackets;
    for (std::size_t k = 0; k + 1 < result.scan.size(); ++k) {
        const auto& p = result.scan[k];
        const auto& q = result.scan[k + 1];
        if (!p.g || !q.g) continue;
        if (*p.g == 0.0 || (*p.g < 0.0 && *q.g > 0.0) || (*p.g > 0.0 && *q.g < 0.0)) brackets.push_back({p.z, q.z, *p.g, *q.g});
    }
    if (!result.scan.empty() && result.scan.back().g && *result.scan.back().g == 0.0) {
        const double z = result.scan.back().z;
        brackets.push_back({z, z, 0.0, 0.0});
    }

    std::vector<std::optional<SolutionProfile>> found(brackets.size());
    std::vector<std::string> failures(brackets.size());
    parallel_for(brackets.size(), threads, [&](std::size_t k) {
        Bracket br = brackets[k];
        int steps = 0;
        try {
            double z = std::abs(br.ga) <= std::abs(br.gb) ? br.a : br.b;
            while (steps < kMaxBisections) {
                if (std::abs(br.ga) <= options.tol_outer) {
                    z = br.a;
                    break;
                }
                if (std::abs(br.gb) <= options.tol_outer) {
                    z = br.b;
                    break;
                }
                const double mid = 0.5 * (br.a + br.b);
                if (mid <= br.a || mid >= br.b) {
                    z = std::abs(br.ga) <= std::abs(br.gb) ? br.a : br.b;
                    break;
                }
                const double gm = phi_of_z(op, mid, u0, options) - mid;
                ++steps;
                z = mid;
                if (std::abs(gm) <= options.tol_outer) break;
                if ((gm < 0.0) == (br.ga < 0.0)) {
                    br.a = mid;
                    br.ga = gm;
                } else {
                    br.b = mid;
                    br.gb = gm;
                }
            }
            SolutionProfile profile;
            int iterations = 0;
            const double phi = phi_of_z(op, z, u0, options, &profile.u, &iterations);
            profile.z_star = z;
            profile.outer_residual = std::abs(phi - z);
            profile.inner_iterations = iterations;
            profile.bisection_steps = steps;
            profile.sup_norm = profile.u.sup_norm();
            profile.integral = profile.u.integral();
            profile.min_on_alpha_beta = profile.u.min_on(spec.boundary.alpha(), spec.boundary.beta());
            profile.localization_lower = result.localization_lower;
            profile.localization_upper = result.localization_upper;
            const ProfileChecks checks = verify_profile(spec, profile.u, z, result.localization_lower,
                                                        result.localization_upper, options);
            profile.residual_sup = checks.residual_sup;
            profile.localization_ok = checks.localization_ok;
            profile.cone_ok = checks.cone_ok;
            profile.annulus_ok = checks.annulus_ok;
            found[k] = std::move(profile);
        } catch (const SolveError& e) {
            failures[k] = "bracket [" + std::to_string(br.a) + ", " + std::to_string(br.b) + "]: " + e.what();
        }
    });
    for (std::size_t k = 0; k < brackets.size(); ++k) {
        if (found[k]) result.profiles.push_back(std::move(*found[k]));
        if (!failures[k].empty()) result.warnings.push_back(failures[k]);
    }
    return result;
}

}  // namespace kvge
