#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <utility>

#include "kvge/cli/commands.hpp"

namespace {

using namespace kvge::cli;

struct Arguments {
    std::string config;
    std::optional<std::string> json;
    std::optional<std::string> csv;
    // Overrides by config key, applied in key order.
    std::map<std::string, std::string> overrides;
};

void add_common(CLI::App& cmd, Arguments& args) {
    cmd.add_option("config", args.config, "Config file or bundled config name")->required();
    cmd.add_option("--json", args.json, "Write the JSON report here ('-' for stdout)");
    cmd.add_option("--csv", args.csv, "Write the solution profile(s) as CSV");
    const std::pair<const char*, const char*> keys[] = {
        {"--margin", "margin"},   {"--c0-mode", "c0_mode"}, {"--theorem", "theorem"}, {"--f", "f"},
        {"--lambda", "lambda"},   {"--A", "A"},             {"--p", "p"},             {"--rho1", "rho1"},
        {"--rho2", "rho2"},       {"--q", "q"},             {"--n-nodes", "n_nodes"}, {"--grid-res", "grid_res"},
    };
    for (const auto& [flag, key] : keys) {
        const std::string k = key;
        cmd.add_option_function<std::string>(
            flag, [&args, k](const std::string& value) { args.overrides[k] = value; },
            "Override config key " + k);
    }
}

int emit(const CommandOutput& out, const Arguments& args) {
    const bool json_to_stdout = args.json && *args.json == "-";
    if (!json_to_stdout) (out.exit_code >= kExitInput ? std::cerr : std::cout) << out.text;
    if (args.json) {
        const std::string text = out.report.dump(2) + "\n";
        if (json_to_stdout) {
            std::cout << text;
        } else {
            std::ofstream file(*args.json);
            if (!file || !(file << text)) {
                std::cerr << "error: cannot write '" << *args.json << "'\n";
                return kExitInput;
            }
        }
    }
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Existence certificates and collocation solutions for nonlocal Kirchhoff-type boundary value problems"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = automatic, capped by KVGE_THREADS)");

    Arguments args;
    std::string command;
    const std::pair<const char*, const char*> commands[] = {
        {"constants", "Print Green, kernel and exponent constants and the norm bounds"},
        {"certify", "Check the theorem's hypothesis inequalities"},
        {"solve", "Certify, then compute positive solutions by collocation"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(*sub, args);
        sub->callback([&command, name] { command = name; });
    }
    auto* list = app.add_subcommand("list", "List the bundled configs");
    list->callback([] {
        for (const auto& name : bundled_names()) std::cout << name << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    if (command.empty()) return 0;

    RunConfig config;
    try {
        config = load_config(args.config);
        for (const auto& [key, value] : args.overrides) set_key(config, key, value);
        validate_config(config);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    if (args.json) config.json = args.json;
    else if (config.json) args.json = config.json;
    if (args.csv) config.csv = args.csv;
    config.threads = threads;

    return emit(run_command(command, config), args);
}
