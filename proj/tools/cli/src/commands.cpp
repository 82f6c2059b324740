#include "kvge/cli/commands.hpp"

#include <sstream>

#include "kvge/cli/report.hpp"
#include "kvge/quadrature.hpp"

namespace kvge::cli {

namespace {

using nlohmann::json;

json header(const std::string& command, const RunConfig& config) {
    return json{{"schema_version", kReportSchemaVersion}, {"command", command}, {"config", config.name}};
}

BoundKind bound_kind_for(Theorem theorem) {
    switch (theorem) {
        case Theorem::T2_8: return BoundKind::ConvexM;
        case Theorem::C2_10:
        case Theorem::C2_11: return BoundKind::SpecialMstar;
        default: return BoundKind::ConcaveMixedMbar;
    }
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "config";
    if (dynamic_cast<const ExprError*>(&e)) return "expression";
    if (dynamic_cast<const CertifyError*>(&e)) return "certify";
    if (dynamic_cast<const GreenError*>(&e)) return "green";
    if (dynamic_cast<const VarexpError*>(&e)) return "exponent";
    if (dynamic_cast<const KernelError*>(&e)) return "kernel";
    if (dynamic_cast<const quad::QuadratureError*>(&e)) return "quadrature";
    if (dynamic_cast<const SolveError*>(&e)) return "solve";
    return "runtime";
}

}  // namespace

int exit_code_for(const std::exception& e) {
    const std::string kind = error_kind(e);
    if (kind == "quadrature" || kind == "solve" || kind == "runtime") return kExitNumerical;
    return kExitInput;
}

CommandOutput cmd_constants(const RunConfig& config) {
    const ProblemSpec spec = build_spec(config);
    const Theorem theorem = config.theorem == Theorem::Auto ? select_theorem(spec) : config.theorem;
    const BoundContext ctx = bound_context(spec, theorem);
    const BoundKind kind = bound_kind_for(theorem);
    const RhoBounds b1 = rho_bounds(spec.rho1, kind, ctx);
    const RhoBounds b2 = rho_bounds(spec.rho2, kind, ctx);
    const BoundaryModel& g = spec.boundary;

    CommandOutput out;
    out.report = header("constants", config);
    out.report["boundary"] = {{"kind", to_string(g.kind())},
                              {"alpha", number_json(g.alpha())},
                              {"beta", number_json(g.beta())},
                              {"eta0", number_json(g.eta0())},
                              {"c0_inf", number_json(g.c0(C0Mode::CoerciveInf))},
                              {"c0_sup", number_json(g.c0(C0Mode::PaperSup))},
                              {"c0_mode", to_string(g.c0_mode())},
                              {"c0", number_json(g.c0())},
                              {"gm", number_json(g.gm())},
                              {"partial_gm", number_json(g.partial_gm())}};
    out.report["kernel"] = {{"description", spec.kernel.describe()},
                            {"mass", number_json(ctx.mass)},
                            {"holder_norm", number_json(ctx.holder_norm)},
                            {"q", number_json(ctx.q)}};
    out.report["exponent"] = {{"p_minus", number_json(spec.p.p_minus())},
                              {"p_plus", number_json(spec.p.p_plus())},
                              {"computed_p_minus", number_json(spec.p.computed().p_minus)},
                              {"computed_p_plus", number_json(spec.p.computed().p_plus)},
                              {"overridden", spec.p.overridden()},
                              {"regime", to_string(spec.p.regime())}};
    out.report["theorem"] = to_string(theorem);
    out.report["bounds"] = {{"rho1", bounds_json(b1)}, {"rho2", bounds_json(b2)}};

    std::ostringstream text;
    text << "boundary           " << g.describe() << "\n";
    text << "eta0               " << describe_number(g.eta0()) << "\n";
    text << "C0 coercive_inf    " << describe_number(g.c0(C0Mode::CoerciveInf)) << "\n";
    text << "C0 paper_sup       " << describe_number(g.c0(C0Mode::PaperSup)) << "\n";
    text << "G^M                " << describe_number(g.gm()) << "\n";
    text << "partial G^M        " << describe_number(g.partial_gm()) << "\n";
    text << "kernel             " << spec.kernel.describe() << "\n";
    text << "kernel mass        " << describe_number(ctx.mass) << "\n";
    text << "holder norm, q     " << describe_number(ctx.holder_norm) << ", " << describe_number(ctx.q) << "\n";
    text << "p-, p+             " << describe_number(spec.p.p_minus()) << ", " << describe_number(spec.p.p_plus())
         << " (" << to_string(spec.p.regime()) << " regime" << (spec.p.overridden() ? ", overridden" : "") << ")\n";
    text << "theorem            " << to_string(theorem) << "\n";
    for (const RhoBounds* b : {&b1, &b2}) {
        text << "rho = " << describe_number(b->rho) << "\n";
        text << "  eps              " << describe_number(b->eps) << "\n";
        text << "  m_rho            " << describe_number(b->m_rho) << "\n";
        text << "  " << to_string(b->bound_kind) << std::string(17 - to_string(b->bound_kind).size(), ' ')
             << describe_number(b->M_upper) << "\n";
    }
    out.text = text.str();
    return out;
}

CommandOutput cmd_certify(const RunConfig& config) {
    const ProblemSpec spec = build_spec(config);
    const Certificate certificate = certify(spec, certify_options(config));
    CommandOutput out;
    out.report = header("certify", config);
    out.report["certificate"] = certificate_json(certificate);
    std::ostringstream text;
    print_certificate(text, certificate);
    out.text = text.str();
    out.exit_code = certificate.pass ? kExitPass : kExitFail;
    return out;
}

CommandOutput cmd_solve(const RunConfig& config) {
    const ProblemSpec spec = build_spec(config);
    const Certificate certificate = certify(spec, certify_options(config));
    const OuterResult result = outer_solve(spec, solve_options(config));

    CommandOutput out;
    out.report = header("solve", config);
    out.report["certificate"] = certificate_json(certificate);
    out.report["solution"] = outer_json(result);
    json csv_files = json::array();
    if (config.csv) {
        for (std::size_t i = 0; i < result.profiles.size(); ++i) {
            const std::string path = indexed_path(*config.csv, i);
            write_csv_file(path, result.profiles[i].u);
            csv_files.push_back(path);
        }
    }
    out.report["csv_files"] = csv_files;

    std::ostringstream text;
    text << "certificate        " << to_string(certificate.theorem) << " "
         << (certificate.pass ? "PASS" : "FAIL") << "\n";
    print_outer(text, result);
    for (const auto& path : csv_files) text << "wrote              " << path.get<std::string>() << "\n";
    out.text = text.str();
    out.exit_code = result.found() ? kExitPass : kExitFail;
    return out;
}

CommandOutput run_command(const std::string& command, const RunConfig& config) {
    try {
        if (command == "constants") return cmd_constants(config);
        if (command == "certify") return cmd_certify(config);
        if (command == "solve") return cmd_solve(config);
        throw ConfigError("<command>", "unknown command '" + command + "'");
    } catch (const std::exception& e) {
        CommandOutput out;
        out.exit_code = exit_code_for(e);
        out.report = header(command, config);
        json error{{"kind", error_kind(e)}, {"message", e.what()}};
        if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) error["key"] = ce->key();
        out.report["error"] = error;
        out.text = "error: " + std::string(e.what()) + "\n";
        return out;
    }
}

}  // namespace kvge::cli
