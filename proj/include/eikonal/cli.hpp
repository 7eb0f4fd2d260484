#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eikonal::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvariant = 2;

/// Header of the bench and classify CSV output.
inline constexpr const char* kBenchHeader =
    "method,operator,threads,repeat,wall_time_s,good,empty,bad,total,residual,inversions";

/// Runs one command line (args[0] is the program name). Normal output goes
/// to `out`, diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eikonal::cli
