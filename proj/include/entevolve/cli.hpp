#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entevolve {

// Exit codes of the ent-evolve tool.
enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitSemantic = 3,
};

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entevolve
