#pragma once

#include <exception>
#include <nlohmann/json.hpp>
#include <string>

#include "kvge/cli/config.hpp"

namespace kvge::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInput = 2, kExitNumerical = 3 };

struct CommandOutput {
    int exit_code = kExitPass;
    nlohmann::json report;
    std::string text;
};

/// Green and kernel constants plus the norm bounds at rho1 and rho2.
CommandOutput cmd_constants(const RunConfig& config);
/// Runs the theorem check; exit 0 when the certificate passes.
CommandOutput cmd_certify(const RunConfig& config);
/// Runs the solver and writes CSV files when config.csv is set; exit 0 when
/// at least one root is found.
CommandOutput cmd_solve(const RunConfig& config);

/// 2 for input and validation errors, 3 for numerical failures.
int exit_code_for(const std::exception& error);

/// Dispatches `command` (constants, certify, solve) and turns every exception
/// into an error report with the matching exit code.
CommandOutput run_command(const std::string& command, const RunConfig& config);

}  // namespace kvge::cli
