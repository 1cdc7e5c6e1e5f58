#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lienard::cli {

/// Exit codes of the lienard tool.
enum ExitCode : int {
    kOk = 0,
    kComputationError = 1,
    kUsageError = 2,
    kUnmatched = 3,
};

/// Runs one invocation. args excludes the program name, e.g.
/// {"bound", "--n", "4", "--m", "2"}. Results go to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lienard::cli
