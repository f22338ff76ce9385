#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tlearn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDivergence = 2;

/// Entry point behind the `tlearn` executable. `args[0]` is the program
/// name. Results go to `out` unless a file is requested; diagnostics go to
/// `err`.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_run(int argc, const char* const* argv);

}  // namespace tlearn::cli
