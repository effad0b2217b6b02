#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nm::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,     // bad flags, bad configuration, unparsable input
  kInternal = 3,  // an invariant was violated
};

/// Runs `narmine <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nm::cli
