#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nvodmr {

// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalidInput = 2,
  kExitFormat = 3,
  kExitPhysics = 4,
};

/// Runs one CLI invocation. `args[0]` is the program name. CSV goes to
/// --out or `out`; diagnostics and warnings go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "start:stop:step"; throws InvalidInput on malformed or empty ranges.
std::vector<double> parse_range(const std::string& spec);

}  // namespace nvodmr
