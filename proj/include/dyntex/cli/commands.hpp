#pragma once

#include <string>
#include <vector>

namespace dyntex::cli {

/// Runs one subcommand; `args` excludes the program name. Failures print a
/// single JSON line {"error":..., "command":...} to stderr and return nonzero
/// (2 for usage errors, 1 otherwise).
int run_cli(const std::vector<std::string>& args);

}  // namespace dyntex::cli
