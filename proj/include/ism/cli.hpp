#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ism {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitNotConverged = 2 };

/// Runs one `fit`, `transform` or `eval` command. `args` excludes the
/// program name. Reports go to --report when given and to `out` otherwise.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ism
