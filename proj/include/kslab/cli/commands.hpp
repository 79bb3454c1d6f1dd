#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kslab::cli {

enum ExitCode : int { kExitOk = 0, kExitInvalidInput = 2, kExitInternal = 3 };

// Runs one command line (args excludes the program name). Reports go to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kslab::cli
