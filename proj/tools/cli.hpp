#pragma once

#include <iosfwd>

namespace contextua::cli {

inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 1;
inline constexpr int kSolverFailure = 2;

/// Runs one command line. Results go to `out` (or the file named by --out),
/// diagnostics to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace contextua::cli
