#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace landscape {

// One CLI invocation: args are everything after the program name, reports go
// to `out` (or the --out path), diagnostics to `err`. Returns the exit code:
// 0 success, 1 I/O, 2 precondition or degenerate input, 3 search failure.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace landscape
