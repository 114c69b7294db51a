#pragma once

#include <string>
#include <vector>

namespace normground::cli {

/// Subcommand dispatch (scalar, system, fiber, hfun, sweep, verify).
/// Returns the process exit code: 0 on success, 1 on check failure,
/// 2 on configuration/validation failure.  Prints one JSON run record
/// to stdout; files go to --out (overridden by $NORMGROUND_OUT).
int run(const std::vector<std::string>& args);

}  // namespace normground::cli
