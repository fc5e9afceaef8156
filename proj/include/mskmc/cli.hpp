#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mskmc::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kEventBudget = 3,
  kTooManyFailures = 4,
};

/// Parses `args` (without the program name) and runs the selected
/// subcommand. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace mskmc::cli
