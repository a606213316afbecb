#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sonarfield::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kNumericalFailure = 2 };

/// Runs one subcommand. args excludes the program name. Results go to `out`
/// or to the files named by flags; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sonarfield::cli
