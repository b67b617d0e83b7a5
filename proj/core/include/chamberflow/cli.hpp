#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chamberflow {

// Runs the command-line interface in-process. `args` excludes the program
// name. Exit codes: 0 success, 1 configuration or validation failure,
// 2 numerical failure, 3 usage error.
int run_cli(const std::vector<std::string>& args, std::istream& in,
            std::ostream& out, std::ostream& err);

}  // namespace chamberflow
