#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvge/certify.hpp"
#include "kvge/solve.hpp"

namespace kvge::cli {

/// A configuration problem tied to one key of the config object.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message);
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Flat run configuration as read from JSON. Numeric keys accept either a
/// JSON number or a constant expression string such as "1/2500".
struct RunConfig {
    std::string name;
    std::string description;

    std::string A;
    std::string f;
    std::string p;
    std::optional<double> p_minus;
    std::optional<double> p_plus;

    std::string kernel = "one";  // one | riemann_liouville | expression
    std::optional<double> kernel_order;
    std::string kernel_expr;

    std::string boundary = "dirichlet";  // dirichlet | right_focal | tabulated
    std::string green_table;
    double alpha = 0.0;
    double beta = 0.0;
    C0Mode c0_mode = C0Mode::CoerciveInf;

    double lambda = 1.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    std::optional<double> q;
    Theorem theorem = Theorem::Auto;

    std::size_t n_nodes = 257;
    int grid_res = 201;
    double tol_inner = 1e-10;
    double tol_outer = 1e-10;
    double quad_tol = 1e-10;
    double margin = 0.0;
    int scan_points = 64;
    int max_iters = 10000;

    /// Command line only; 0 lets the solver decide.
    unsigned threads = 0;

    std::optional<std::string> json;
    std::optional<std::string> csv;

    /// Directory used to resolve a relative green_table path.
    std::string base_dir = ".";
};

/// Every key accepted in a config object.
const std::vector<std::string>& config_keys();

/// Parses and validates a JSON config text. Unknown keys, missing required
/// keys (A, f, p, rho1, rho2, alpha, beta) and out-of-range values raise
/// ConfigError naming the key.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");

/// `source` is either a bundled config name or a path to a JSON file.
RunConfig load_config(const std::string& source);

/// Assigns one key from its text form, as a command-line override does.
void set_key(RunConfig& config, const std::string& key, const std::string& value);

/// Re-runs the range checks after command-line overrides.
void validate_config(const RunConfig& config);

/// Builds the problem; every failure is reported as a ConfigError naming
/// the responsible key.
ProblemSpec build_spec(const RunConfig& config);

CertifyOptions certify_options(const RunConfig& config);
SolveOptions solve_options(const RunConfig& config);

/// Names and JSON texts of the configs compiled into the binary.
std::vector<std::string> bundled_names();
std::optional<std::string> bundled_config(const std::string& name);

}  // namespace kvge::cli
