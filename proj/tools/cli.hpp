#ifndef TOM_CLI_HPP
#define TOM_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace tom::cli {

// Runs one CLI invocation. argv excludes the program name. Diagnostics go to
// `err` only; machine-readable output goes to `out` or the requested files.
// Exit codes: detect 0 = no conflicts, 1 = conflicts found, 2 = usage or
// manifest error; run-test 0 = pass, 1 = assertion failure, 2 = error.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace tom::cli

#endif
