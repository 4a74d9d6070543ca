#pragma once

#include <ostream>

namespace curvi {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // diff above tolerance, unexpected errors
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

// Runs the `curvi` command line. Normal output goes to `out`, diagnostics
// and warnings to `err`.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curvi
