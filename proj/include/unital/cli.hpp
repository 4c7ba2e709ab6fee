#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace unital {

enum ExitStatus : int {
  kExitOk = 0,
  kExitMismatch = 1,
  kExitUsage = 2,
  kExitInput = 3,
  kExitBudget = 4,
};

/// Runs one command line (without the program name). Human output goes to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unital
