#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coiso/cli/config.hpp"

namespace coiso::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRunFailed = 2, kFilesystemError = 3 };

/// Initial point for a run. The reference points z_a, z_b, z_c are carried onto Mp of the chosen
/// problem first (they sit on |z|² = 0.98, off the unit sphere).
PhasePoint resolve_initial(const RunConfig& cfg, const BuiltinProblem& problem, std::vector<std::string>& notes);

/// Executes the run and writes the requested files plus report.json into
/// cfg.outputDir. Progress and errors go to `log`.
int run(const RunConfig& cfg, std::ostream& log);

/// Structure report only. Prints key=value lines; exit 2 when a verdict fails.
int check(const RunConfig& cfg, std::ostream& out);

void list_problems(std::ostream& out);

/// Shortest round-trip decimal form, 17 significant digits.
std::string format_double(double x);

}  // namespace coiso::cli
