#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qincompat::cli {

// Runs the command-line interface on the given arguments (without argv[0]).
// Exit codes: 0 success, 1 input error, 2 solver failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qincompat::cli
