#include "kvge/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace kvge::cli {

namespace {

using nlohmann::json;

std::string fmt(double value, int digits = 10) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
    return buffer;
}

const std::vector<int>& squarefree() {
    static const std::vector<int> values = [] {
        std::vector<int> out;
        for (int k = 1; k <= 100; ++k) {
            bool free = true;
            for (int d = 2; d * d <= k; ++d)
                if (k % (d * d) == 0) free = false;
            if (free) out.push_back(k);
        }
        return out;
    }();
    return values;
}

std::optional<std::string> rational(double r) {
    for (long b = 1; b <= 1000; ++b) {
        const double a = std::round(r * static_cast<double>(b));
        if (std::abs(a) > 1e12) return std::nullopt;
        if (std::abs(a / static_cast<double>(b) - r) <= 1e-12 * std::abs(r)) {
            const long n = static_cast<long>(a);
            return b == 1 ? std::to_string(n) : std::to_string(n) + "/" + std::to_string(b);
        }
    }
    return std::nullopt;
}

const char* yes(bool ok) { return ok ? "yes" : "NO"; }

}  // namespace

json number_json(double value) {
    if (!std::isfinite(value)) return nullptr;
    return value;
}

std::optional<std::string> closed_form(double value) {
    if (!std::isfinite(value)) return std::nullopt;
    if (value == 0.0) return "0";
    for (const int k : squarefree()) {
        const auto r = rational(value / std::sqrt(static_cast<double>(k)));
        if (!r) continue;
        if (k == 1) return r;
        return (*r == "1" ? std::string() : *r + "*") + "sqrt(" + std::to_string(k) + ")";
    }
    return std::nullopt;
}

std::string describe_number(double value) {
    const std::string decimal = fmt(value);
    const auto exact = closed_form(value);
    if (!exact || *exact == decimal) return decimal;
    return *exact + " = " + decimal;
}

json bounds_json(const RhoBounds& b) {
    return json{{"rho", number_json(b.rho)},         {"eps", number_json(b.eps)},
                {"m_rho", number_json(b.m_rho)},     {"M_upper", number_json(b.M_upper)},
                {"q_used", number_json(b.q_used)},   {"bound_kind", to_string(b.bound_kind)}};
}

namespace {

json box_json(const FBox& box) {
    return json{{"t_lo", number_json(box.t_lo)}, {"t_hi", number_json(box.t_hi)}, {"u_lo", number_json(box.u_lo)},
                {"u_hi", number_json(box.u_hi)}, {"value", number_json(box.value)}};
}

}  // namespace

json certificate_json(const Certificate& c) {
    json condition1{{"lhs", number_json(c.condition1_lhs)},
                    {"rhs", number_json(c.condition1_rhs)},
                    {"ok", c.condition1_ok},
                    {"variant_lhs", c.condition1_variant_lhs ? number_json(*c.condition1_variant_lhs) : json(nullptr)},
                    {"variant_ok", c.condition1_variant_ok ? json(*c.condition1_variant_ok) : json(nullptr)}};
    json condition2{{"x", number_json(c.condition2_x)},
                    {"branch_minus", number_json(c.condition2_branch_minus)},
                    {"branch_plus", number_json(c.condition2_branch_plus)},
                    {"lhs", number_json(c.condition2_lhs)},
                    {"rhs", number_json(c.condition2_rhs)},
                    {"ok", c.condition2_ok}};
    json window = nullptr;
    if (c.lambda_window)
        window = json{{"lambda_min", number_json(c.lambda_window->lambda_min)},
                      {"lambda_max", number_json(c.lambda_window->lambda_max)}};
    return json{
        {"theorem", to_string(c.theorem)},
        {"regime", to_string(c.regime)},
        {"bound_kind", to_string(c.bound_kind)},
        {"lambda", number_json(c.lambda)},
        {"rho1", number_json(c.rho1)},
        {"rho2", number_json(c.rho2)},
        {"p_minus", number_json(c.p_minus)},
        {"p_plus", number_json(c.p_plus)},
        {"margin", number_json(c.margin)},
        {"constants",
         {{"eta0", number_json(c.eta0)},
          {"c0", number_json(c.c0)},
          {"c0_mode", to_string(c.c0_mode)},
          {"gm", number_json(c.gm)},
          {"partial_gm", number_json(c.partial_gm)},
          {"mass", number_json(c.mass)},
          {"holder_norm", number_json(c.holder_norm)},
          {"q", number_json(c.q)},
          {"inner_mass", number_json(c.inner_mass)}}},
        {"bounds", {{"rho1", bounds_json(c.bounds_rho1)}, {"rho2", bounds_json(c.bounds_rho2)}}},
        {"f_min_box", box_json(c.f_min_box)},
        {"f_max_box", box_json(c.f_max_box)},
        {"A_rho1", number_json(c.A_rho1)},
        {"A_rho2", number_json(c.A_rho2)},
        {"A_min_sampled", number_json(c.A_min_sampled)},
        {"positivity_ok", c.positivity_ok},
        {"condition1", condition1},
        {"condition2", condition2},
        {"pass", c.pass},
        {"lambda_window", window},
        {"localization", {{"lower", number_json(c.localization_lower)}, {"upper", number_json(c.localization_upper)}}},
    };
}

json profile_json(const SolutionProfile& p) {
    return json{{"z_star", number_json(p.z_star)},
                {"outer_residual", number_json(p.outer_residual)},
                {"residual_sup", number_json(p.residual_sup)},
                {"sup_norm", number_json(p.sup_norm)},
                {"integral", number_json(p.integral)},
                {"min_on_alpha_beta", number_json(p.min_on_alpha_beta)},
                {"localization_lower", number_json(p.localization_lower)},
                {"localization_upper", number_json(p.localization_upper)},
                {"localization_ok", p.localization_ok},
                {"cone_ok", p.cone_ok},
                {"annulus_ok", p.annulus_ok},
                {"inner_iterations", p.inner_iterations},
                {"bisection_steps", p.bisection_steps},
                {"n_nodes", p.u.size()}};
}

json outer_json(const OuterResult& r) {
    json roots = json::array();
    for (const auto& p : r.profiles) roots.push_back(profile_json(p));
    json scan = json::array();
    for (const auto& s : r.scan)
        scan.push_back(json{{"z", number_json(s.z)},
                            {"g", s.g ? number_json(*s.g) : json(nullptr)},
                            {"skipped_reason", s.skipped_reason}});
    return json{{"found", r.found()},
                {"roots", roots},
                {"localization", {{"lower", number_json(r.localization_lower)}, {"upper", number_json(r.localization_upper)}}},
                {"warnings", r.warnings},
                {"scan", scan}};
}

void print_certificate(std::ostream& out, const Certificate& c) {
    out << "theorem            " << to_string(c.theorem) << " (" << to_string(c.regime) << " regime, bound "
        << to_string(c.bound_kind) << ")\n";
    out << "lambda             " << describe_number(c.lambda) << "\n";
    out << "rho1, rho2         " << describe_number(c.rho1) << ", " << describe_number(c.rho2) << "\n";
    out << "p-, p+             " << describe_number(c.p_minus) << ", " << describe_number(c.p_plus) << "\n";
    out << "eta0               " << describe_number(c.eta0) << "\n";
    out << "C0 (" << to_string(c.c0_mode) << ")" << std::string(c.c0_mode == C0Mode::CoerciveInf ? 2 : 6, ' ')
        << describe_number(c.c0) << "\n";
    out << "G^M                " << describe_number(c.gm) << "\n";
    out << "partial G^M        " << describe_number(c.partial_gm) << "\n";
    out << "kernel mass        " << describe_number(c.mass) << "\n";
    out << "holder norm, q     " << describe_number(c.holder_norm) << ", " << describe_number(c.q) << "\n";
    for (const RhoBounds* b : {&c.bounds_rho1, &c.bounds_rho2}) {
        out << "bounds at rho=" << fmt(b->rho) << ": m_rho " << describe_number(b->m_rho) << ", "
            << to_string(b->bound_kind) << " " << describe_number(b->M_upper) << "\n";
    }
    out << "f^m box            t in [" << fmt(c.f_min_box.t_lo) << ", " << fmt(c.f_min_box.t_hi) << "], u in ["
        << describe_number(c.f_min_box.u_lo) << ", " << describe_number(c.f_min_box.u_hi)
        << "], f^m = " << describe_number(c.f_min_box.value) << "\n";
    out << "f^M box            t in [" << fmt(c.f_max_box.t_lo) << ", " << fmt(c.f_max_box.t_hi) << "], u in ["
        << describe_number(c.f_max_box.u_lo) << ", " << describe_number(c.f_max_box.u_hi)
        << "], f^M = " << describe_number(c.f_max_box.value) << "\n";
    out << "A(rho1), A(rho2)   " << describe_number(c.A_rho1) << ", " << describe_number(c.A_rho2) << "\n";
    out << "A > 0 on [rho1,rho2] " << yes(c.positivity_ok) << " (min sampled " << fmt(c.A_min_sampled) << ")\n";
    out << "condition 1        " << fmt(c.condition1_lhs) << " > " << fmt(c.condition1_rhs) << "  "
        << yes(c.condition1_ok) << "\n";
    if (c.condition1_variant_lhs)
        out << "condition 1 (-1)   " << fmt(*c.condition1_variant_lhs) << " > " << fmt(c.condition1_rhs) << "  "
            << yes(c.condition1_variant_ok.value_or(false)) << "\n";
    out << "condition 2        " << fmt(c.condition2_lhs) << " < " << fmt(c.condition2_rhs) << "  "
        << yes(c.condition2_ok) << "  (x = " << fmt(c.condition2_x) << ")\n";
    if (c.lambda_window)
        out << "lambda window      (" << fmt(c.lambda_window->lambda_min) << ", " << fmt(c.lambda_window->lambda_max)
            << ")\n";
    else
        out << "lambda window      empty\n";
    out << "localization       [" << describe_number(c.localization_lower) << ", "
        << describe_number(c.localization_upper) << "]\n";
    out << "result             " << (c.pass ? "PASS" : "FAIL") << "\n";
}

void print_outer(std::ostream& out, const OuterResult& r) {
    out << "localization       [" << fmt(r.localization_lower) << ", " << fmt(r.localization_upper) << "]\n";
    std::size_t skipped = 0;
    for (const auto& s : r.scan)
        if (!s.g) ++skipped;
    out << "scan               " << r.scan.size() << " points, " << skipped << " skipped\n";
    for (const auto& w : r.warnings) out << "warning            " << w << "\n";
    if (!r.found()) {
        out << "result             no self-consistent solution located in [rho1, rho2]\n";
        return;
    }
    for (std::size_t i = 0; i < r.profiles.size(); ++i) {
        const auto& p = r.profiles[i];
        out << "root " << i << "\n";
        out << "  z*               " << fmt(p.z_star, 12) << "\n";
        out << "  |Phi(z*) - z*|   " << fmt(p.outer_residual, 3) << "\n";
        out << "  residual sup     " << fmt(p.residual_sup, 3) << "\n";
        out << "  ||u||, int u     " << fmt(p.sup_norm) << ", " << fmt(p.integral) << "\n";
        out << "  min on [a,b]     " << fmt(p.min_on_alpha_beta) << "\n";
        out << "  localization     " << yes(p.localization_ok) << "\n";
        out << "  cone             " << yes(p.cone_ok) << "\n";
        out << "  annulus          " << yes(p.annulus_ok) << "\n";
        out << "  iterations       " << p.inner_iterations << " inner, " << p.bisection_steps << " bisection\n";
    }
}

void write_csv(std::ostream& out, const GridFunction& u) {
    out << "t,u\n";
    char buffer[80];
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g\n", u.node(i), u[i]);
        out << buffer;
    }
}

void write_csv_file(const std::string& path, const GridFunction& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, u);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string indexed_path(const std::string& path, std::size_t index) {
    if (index == 0) return path;
    const std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / (p.stem().string() + "_" + std::to_string(index));
    out += p.extension();
    return out.string();
}

}  // namespace kvge::cli
