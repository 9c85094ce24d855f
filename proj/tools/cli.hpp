#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddcc::cli {

enum ExitCode { kOk = 0, kUsage = 2, kSolverFailure = 3 };

/// Runs the command line `args` (without the program name). Regular output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Number formatting used by every CSV: %.12g.
std::string fmt(double v);

/// "lo:hi:COUNT[log]" (inclusive endpoints) or a comma list.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace ddcc::cli
