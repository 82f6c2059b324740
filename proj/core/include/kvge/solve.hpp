#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvge/certify.hpp"
#include "kvge/grid_function.hpp"

namespace kvge {

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A(z) <= 0: the frozen problem has no positive coefficient to divide by.
class DegenerateCoefficientError : public SolveError {
public:
    DegenerateCoefficientError(double z, double a);
    double z() const noexcept { return z_; }

private:
    double z_;
};

/// Damped Picard iteration failed even at the smallest damping factor.
class DivergenceError : public SolveError {
public:
    DivergenceError(const std::string& message, double last_residual);
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

struct SolveOptions {
    std::size_t n_nodes = 257;
    double tol_inner = 1e-10;
    int max_iters = 10000;
    double omega_floor = 1.0 / 64.0;
    double tol_outer = 1e-10;
    int scan_points = 64;
    double localization_tol = 1e-6;
    /// Cone checks use cone_tol * max(1, ||u||).
    double cone_tol = 1e-9;
    /// Theorem whose bounds define the localization band (Auto resolves as
    /// in certify).
    Theorem theorem = Theorem::Auto;
    /// 0 means: KVGE_THREADS if set, else the hardware concurrency.
    unsigned threads = 0;
};

/// Worker count from `requested`, capped by KVGE_THREADS when set.
unsigned resolve_threads(unsigned requested);

/// The collocation form of T with the nonlocal argument frozen at z:
/// v(t_i) = lambda / A(z) sum_j w_j G(t_i, s_j) f(s_j, u_j) with trapezoid
/// weights w_j on the uniform nodes. The weighted Green matrix is built once.
class HammersteinOperator {
public:
    HammersteinOperator(const ProblemSpec& spec, std::size_t n_nodes);

    const ProblemSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return n_; }

    /// Throws DegenerateCoefficientError when A(z) <= 0 and SolveError when
    /// f is negative or cannot be evaluated.
    GridFunction apply(const GridFunction& u, double z) const;
    double coefficient(double z) const;

private:
    ProblemSpec spec_;
    std::size_t n_;
    std::vector<double> weighted_green_;  // row-major, w_j G(t_i, s_j)
};

GridFunction apply_T(const ProblemSpec& spec, const GridFunction& u, double z);

struct InnerResult {
    GridFunction u;
    int iterations = 0;
    double residual = 0.0;
    double omega = 1.0;
};

/// Damped Picard iteration u <- (1 - w) u + w T_z u from u0 until the sup
/// change is below tol_inner * max(1, ||u||). If the change has not
/// improved for 100 iterations or has doubled, w is halved and the iteration
/// restarts from the best iterate; below omega_floor a DivergenceError is
/// thrown.
InnerResult inner_solve(const HammersteinOperator& op, double z, const GridFunction& u0,
                        const SolveOptions& options = {});
InnerResult inner_solve(const ProblemSpec& spec, double z, const GridFunction& u0, const SolveOptions& options = {});

struct ProfileChecks {
    bool localization_ok = false;
    bool cone_ok = false;
    bool annulus_ok = false;
    double residual_sup = 0.0;
};

struct SolutionProfile {
    GridFunction u{std::vector<double>{0.0, 0.0}};
    double z_star = 0.0;
    /// |Phi(z*) - z*|, the outer self-consistency defect.
    double outer_residual = 0.0;
    double residual_sup = 0.0;
    double sup_norm = 0.0;
    double integral = 0.0;
    double min_on_alpha_beta = 0.0;
    double localization_lower = 0.0;
    double localization_upper = 0.0;
    bool localization_ok = false;
    bool cone_ok = false;
    bool annulus_ok = false;
    int inner_iterations = 0;
    int bisection_steps = 0;

    bool all_ok() const noexcept { return localization_ok && cone_ok && annulus_ok; }
};

/// Never throws: a degenerate coefficient reports an infinite residual.
ProfileChecks verify_profile(const ProblemSpec& spec, const GridFunction& u, double z_star, double lower,
                             double upper, const SolveOptions& options = {});

struct ScanPoint {
    double z = 0.0;
    /// Phi(z) - z; absent when A(z) <= 0 or the inner solve failed.
    std::optional<double> g;
    std::string skipped_reason;
};

struct OuterResult {
    std::vector<SolutionProfile> profiles;
    std::vector<ScanPoint> scan;
    std::vector<std::string> warnings;
    double localization_lower = 0.0;
    double localization_upper = 0.0;

    bool found() const noexcept { return !profiles.empty(); }
};

/// Phi(z) = nonlocal value of the inner solution at frozen z, read through
/// the cubic interpolant of u.
double phi_of_z(const HammersteinOperator& op, double z, const GridFunction& u0, const SolveOptions& options,
                GridFunction* solution = nullptr, int* iterations = nullptr);

/// Geometric scan of z over [rho1, rho2], bisection on every sign change of
/// Phi(z) - z, and a verified profile for each root. An empty profile list
/// means no self-consistent solution was located in [rho1, rho2].
OuterResult outer_solve(const ProblemSpec& spec, const SolveOptions& options = {});

}  // namespace kvge
