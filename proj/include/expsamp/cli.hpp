#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace expsamp::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// --out when given, otherwise to `out`; diagnostics go to `err`.
/// Returns 0 when every verdict passes, 1 on a failed verdict, 2 on usage or
/// configuration errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace expsamp::cli
