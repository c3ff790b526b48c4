#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relik::cli {

/// Runs one command line (without the program name). The artifact goes to
/// `out`; failures go to `err` as one JSON line {"error","location","message"}.
/// Returns 0 on success, 1 for usage or validation errors, 2 for runtime
/// errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relik::cli
