#pragma once
#include <string>
#include <vector>

namespace airq::cli {

// Runs one subcommand. Exit codes: 0 success, 1 runtime failure, 2
// usage/config error. argv excludes the program name.
int execute(const std::vector<std::string>& argv);

}  // namespace airq::cli
