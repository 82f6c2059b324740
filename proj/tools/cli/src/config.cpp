#include "kvge/cli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace kvge::cli {

namespace {

using nlohmann::json;

double number(const json& value, const std::string& key) {
    if (value.is_number()) {
        const double v = value.get<double>();
        if (!std::isfinite(v)) throw ConfigError(key, "value must be finite");
        return v;
    }
    if (value.is_string()) {
        try {
            return Expression::constant(value.get<std::string>()).eval(std::span<const double>{});
        } catch (const ExprError& e) {
            throw ConfigError(key, std::string("not a constant expression: ") + e.what());
        }
    }
    throw ConfigError(key, "expected a number or a constant expression string");
}

int integer(const json& value, const std::string& key) {
    const double v = number(value, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key, "expected an integer");
    return static_cast<int>(v);
}

std::string text(const json& value, const std::string& key) {
    if (!value.is_string()) throw ConfigError(key, "expected a string");
    return value.get<std::string>();
}

Expression parse_expr(const std::string& source, std::vector<std::string> vars, const std::string& key) {
    if (source.empty()) throw ConfigError(key, "expression is empty");
    try {
        return Expression::parse(source, std::move(vars));
    } catch (const ExprError& e) {
        throw ConfigError(key, e.what());
    }
}

void assign(RunConfig& c, const std::string& k, const json& v) {
    auto optional_number = [&](std::optional<double>& slot) { slot = number(v, k); };
    if (k == "name") c.name = text(v, k);
    else if (k == "description") c.description = text(v, k);
    else if (k == "A") c.A = text(v, k);
    else if (k == "f") c.f = text(v, k);
    else if (k == "p") c.p = text(v, k);
    else if (k == "p_minus") optional_number(c.p_minus);
    else if (k == "p_plus") optional_number(c.p_plus);
    else if (k == "kernel") c.kernel = text(v, k);
    else if (k == "kernel_order") optional_number(c.kernel_order);
    else if (k == "kernel_expr") c.kernel_expr = text(v, k);
    else if (k == "boundary") c.boundary = text(v, k);
    else if (k == "green_table") c.green_table = text(v, k);
    else if (k == "alpha") c.alpha = number(v, k);
    else if (k == "beta") c.beta = number(v, k);
    else if (k == "c0_mode") {
        try {
            c.c0_mode = parse_c0_mode(text(v, k));
        } catch (const GreenError& e) {
            throw ConfigError(k, e.what());
        }
    } else if (k == "lambda") c.lambda = number(v, k);
    else if (k == "rho1") c.rho1 = number(v, k);
    else if (k == "rho2") c.rho2 = number(v, k);
    else if (k == "q") optional_number(c.q);
    else if (k == "theorem") {
        try {
            c.theorem = parse_theorem(text(v, k));
        } catch (const CertifyError& e) {
            throw ConfigError(k, e.what());
        }
    } else if (k == "n_nodes") {
        const int n = integer(v, k);
        if (n < 3) throw ConfigError(k, "need at least 3 nodes");
        c.n_nodes = static_cast<std::size_t>(n);
    } else if (k == "grid_res") c.grid_res = integer(v, k);
    else if (k == "tol_inner") c.tol_inner = number(v, k);
    else if (k == "tol_outer") c.tol_outer = number(v, k);
    else if (k == "quad_tol") c.quad_tol = number(v, k);
    else if (k == "margin") c.margin = number(v, k);
    else if (k == "scan_points") c.scan_points = integer(v, k);
    else if (k == "max_iters") c.max_iters = integer(v, k);
    else if (k == "json") c.json = text(v, k);
    else if (k == "csv") c.csv = text(v, k);
    else throw ConfigError(k, "unknown key");
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "name",      "description", "A",         "f",          "p",           "p_minus",   "p_plus",
        "kernel",    "kernel_order", "kernel_expr", "boundary", "green_table", "alpha",     "beta",
        "c0_mode",   "lambda",      "rho1",      "rho2",       "q",           "theorem",   "n_nodes",
        "grid_res",  "tol_inner",   "tol_outer", "quad_tol",   "margin",      "scan_points", "max_iters",
        "json",      "csv"};
    return keys;
}

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("<document>", "config must be a JSON object");

    RunConfig c;
    c.base_dir = base_dir;
    for (const auto& [key, value] : doc.items()) assign(c, key, value);
    for (const char* key : {"A", "f", "p", "rho1", "rho2", "alpha", "beta"}) {
        if (!doc.contains(key)) throw ConfigError(key, "required key is missing");
    }
    validate_config(c);
    return c;
}

void validate_config(const RunConfig& c) {
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError("alpha", "must lie in [0, 1]");
    if (!(c.beta > c.alpha && c.beta <= 1.0)) throw ConfigError("beta", "must satisfy alpha < beta <= 1");
    if (!(c.rho1 > 0.0)) throw ConfigError("rho1", "must be positive");
    if (!(c.rho2 > c.rho1)) throw ConfigError("rho2", "must exceed rho1");
    if (!(c.lambda >= 0.0)) throw ConfigError("lambda", "must be nonnegative");
    if (c.q && !(*c.q > 1.0)) throw ConfigError("q", "must exceed 1");
    if (c.grid_res < 2) throw ConfigError("grid_res", "must be at least 2");
    if (c.n_nodes < 3) throw ConfigError("n_nodes", "need at least 3 nodes");
    if (!(c.tol_inner > 0.0)) throw ConfigError("tol_inner", "must be positive");
    if (!(c.tol_outer > 0.0)) throw ConfigError("tol_outer", "must be positive");
    if (!(c.quad_tol > 0.0)) throw ConfigError("quad_tol", "must be positive");
    if (!(c.margin >= 0.0)) throw ConfigError("margin", "must be nonnegative");
    if (c.scan_points < 2) throw ConfigError("scan_points", "must be at least 2");
    if (c.max_iters < 1) throw ConfigError("max_iters", "must be positive");
    if (c.kernel != "one" && c.kernel != "riemann_liouville" && c.kernel != "expression")
        throw ConfigError("kernel", "expected one, riemann_liouville or expression, got '" + c.kernel + "'");
    if (c.kernel == "riemann_liouville" && !c.kernel_order)
        throw ConfigError("kernel_order", "required for the riemann_liouville kernel");
    if (c.kernel == "expression" && c.kernel_expr.empty())
        throw ConfigError("kernel_expr", "required for the expression kernel");
    if (c.boundary != "dirichlet" && c.boundary != "right_focal" && c.boundary != "tabulated")
        throw ConfigError("boundary", "expected dirichlet, right_focal or tabulated, got '" + c.boundary + "'");
    if (c.boundary == "tabulated" && c.green_table.empty())
        throw ConfigError("green_table", "required for the tabulated boundary");
}

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
    assign(config, key, nlohmann::json(value));
}

RunConfig load_config(const std::string& source) {
    if (auto text = bundled_config(source)) return parse_config(*text, ".");
    std::ifstream in(source);
    if (!in) throw ConfigError("<document>", "no bundled config named '" + source + "' and no readable file there");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto dir = std::filesystem::path(source).parent_path();
    return parse_config(buffer.str(), dir.empty() ? "." : dir.string());
}

ProblemSpec build_spec(const RunConfig& c) {
    validate_config(c);
    Expression A = parse_expr(c.A, {"t"}, "A");
    Expression f = parse_expr(c.f, {"t", "u"}, "f");
    Expression p = parse_expr(c.p, {"t"}, "p");

    std::optional<ExponentProfile> profile;
    try {
        std::optional<ExponentBounds> override_bounds;
        if (c.p_minus || c.p_plus) {
            const ExponentBounds computed = extract_bounds(p);
            override_bounds = ExponentBounds{c.p_minus.value_or(computed.p_minus), c.p_plus.value_or(computed.p_plus)};
        }
        profile.emplace(p, override_bounds);
    } catch (const VarexpError& e) {
        throw ConfigError(c.p_minus || c.p_plus ? "p_minus" : "p", e.what());
    }

    quad::Settings quad;
    quad.abs_tol = c.quad_tol;
    quad.rel_tol = c.quad_tol;
    std::optional<Kernel> kernel;
    try {
        if (c.kernel == "one") {
            kernel.emplace(Kernel::constant_one(quad));
        } else if (c.kernel == "riemann_liouville") {
            kernel.emplace(Kernel::riemann_liouville(*c.kernel_order, quad));
        } else {
            kernel.emplace(Kernel::from_expression(parse_expr(c.kernel_expr, {"t"}, "kernel_expr"), quad));
        }
    } catch (const KernelError& e) {
        throw ConfigError(c.kernel == "riemann_liouville" ? "kernel_order" : "kernel", e.what());
    } catch (const quad::QuadratureError& e) {
        throw ConfigError("kernel", e.what());
    }

    std::optional<BoundaryModel> boundary;
    try {
        if (c.boundary == "dirichlet") {
            boundary.emplace(BoundaryModel::dirichlet(c.alpha, c.beta, c.c0_mode));
        } else if (c.boundary == "right_focal") {
            boundary.emplace(BoundaryModel::right_focal(c.alpha, c.beta, c.c0_mode));
        } else {
            std::filesystem::path path(c.green_table);
            if (path.is_relative()) path = std::filesystem::path(c.base_dir) / path;
            GreenTable table;
            try {
                table = read_green_csv_file(path.string());
            } catch (const GreenError& e) {
                throw ConfigError("green_table", e.what());
            }
            boundary.emplace(BoundaryModel::tabulated(std::move(table), c.alpha, c.beta, c.c0_mode));
        }
    } catch (const GreenError& e) {
        throw ConfigError("boundary", e.what());
    }

    ProblemSpec spec{std::move(A), std::move(f), std::move(*profile), std::move(*kernel), std::move(*boundary),
                     c.lambda, c.rho1, c.rho2, c.q};
    try {
        validate(spec);
        require_theorem_applies(spec, c.theorem);
    } catch (const CertifyError& e) {
        throw ConfigError("theorem", e.what());
    }
    return spec;
}

CertifyOptions certify_options(const RunConfig& c) {
    CertifyOptions o;
    o.theorem = c.theorem;
    o.margin = c.margin;
    o.grid_res = c.grid_res;
    return o;
}

SolveOptions solve_options(const RunConfig& c) {
    SolveOptions o;
    o.n_nodes = c.n_nodes;
    o.tol_inner = c.tol_inner;
    o.tol_outer = c.tol_outer;
    o.scan_points = c.scan_points;
    o.max_iters = c.max_iters;
    o.theorem = c.theorem;
    o.threads = c.threads;
    return o;
}

}  // namespace kvge::cli
