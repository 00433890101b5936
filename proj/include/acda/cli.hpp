#pragma once

namespace acda {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitDivergence = 2 };

/// Entry point shared by the acda executable and the tests.
int run_cli(int argc, const char* const* argv);

}  // namespace acda
