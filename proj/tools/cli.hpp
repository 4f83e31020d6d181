#pragma once

#include <iosfwd>

namespace demosel {

/// Runs the demosel command line against the given streams. Returns the
/// process exit status: 0 ok, 1 runtime failure, 2 usage or config error.
/// Failures are reported as one JSON line on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace demosel
