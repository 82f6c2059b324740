#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvge::quad {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Controls for the composite Gauss-Legendre integrators.
struct Settings {
    int base_panels = 64;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_levels = 12;
};

/// 16-point Gauss-Legendre rule on [-1, 1], computed once by Newton
/// iteration on P_16.
struct GaussRule {
    static constexpr int kPoints = 16;
    std::array<double, kPoints> nodes{};
    std::array<double, kPoints> weights{};
};

const GaussRule& gauss_legendre_16();

/// One Gauss-Legendre panel on [a, b].
template <class F>
double panel(F&& f, double a, double b) {
    const GaussRule& rule = gauss_legendre_16();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < GaussRule::kPoints; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

/// Composite rule over consecutive mesh points, each segment split into
/// `subdivisions` equal panels.
template <class F>
double composite(F&& f, std::span<const double> mesh, int subdivisions = 1) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
        const double a = mesh[k];
        const double h = (mesh[k + 1] - a) / subdivisions;
        for (int j = 0; j < subdivisions; ++j) {
            const double lo = a + j * h;
            const double hi = (j + 1 == subdivisions) ? mesh[k + 1] : lo + h;
            total += panel(f, lo, hi);
        }
    }
    return total;
}

/// `panels + 1` equispaced points on [a, b].
std::vector<double> uniform_mesh(int panels, double a, double b);

/// Mesh on [a, b] graded toward `a` with the given exponent:
/// x_k = a + (b - a) (k / panels)^exponent.
std::vector<double> graded_mesh(int panels, double a, double b, double exponent);

/// Mesh on [0, 1] graded toward both endpoints (mirror of a graded mesh on
/// [0, 1/2]).
std::vector<double> two_sided_graded_mesh(int panels, double exponent);

/// Sorted union of `mesh` and those `breakpoints` strictly inside it, with
/// near-duplicates (closer than 1e-14 relative to the span) removed.
std::vector<double> merge_breakpoints(std::span<const double> mesh, std::span<const double> breakpoints);

struct Estimate {
    double value = 0.0;
    double error = 0.0;
    int level = 0;
};

inline bool converged(double previous, double current, const Settings& s) {
    return std::abs(current - previous) <= std::max(s.abs_tol, s.rel_tol * std::abs(current));
}

/// Repeated halving: `estimate(level)` must return an integral estimate at a
/// resolution proportional to 2^level. Stops when two consecutive levels
/// agree within tolerance; throws QuadratureError otherwise.
template <class LevelFn>
Estimate refine(LevelFn&& estimate, const Settings& s, const std::string& what) {
    double previous = estimate(0);
    for (int level = 1; level <= s.max_levels; ++level) {
        const double current = estimate(level);
        if (!std::isfinite(current)) throw QuadratureError(what + ": non-finite quadrature estimate");
        if (converged(previous, current, s)) return {current, std::abs(current - previous), level};
        previous = current;
    }
    throw QuadratureError(what + ": quadrature did not converge after " + std::to_string(s.max_levels) +
                          " refinements");
}

}  // namespace kvge::quad
