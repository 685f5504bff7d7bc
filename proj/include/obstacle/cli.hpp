#pragma once

#include <iosfwd>

namespace obstacle {

/// Command-line entry point. Exit codes: 0 success or all checks passed,
/// 1 a check failed, 2 usage, configuration or validation error, 3 numerical
/// failure. Errors are reported on `err` as `error: code=<name> message=<text>`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace obstacle
