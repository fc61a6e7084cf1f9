#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankcorr::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;           // success, or counterexample confirmed
inline constexpr int kExitUsage = 1;        // bad arguments, I/O or parse failure
inline constexpr int kExitInvalid = 2;      // input matrix is not a correlation matrix
inline constexpr int kExitInconclusive = 3; // certificate not violated / not a frame / not converged

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankcorr::cli
