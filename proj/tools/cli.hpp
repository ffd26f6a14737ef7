#pragma once

#include <iosfwd>

namespace qmam::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kUsage = 2,
  kInconclusive = 3,
};

/// Runs one subcommand (gen, solve, validate, oracle). Messages go to `out`
/// and diagnostics to `err`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace qmam::cli
