#pragma once

// In-process command-line entry point. Exit codes: 0 success, 2 usage or
// config error, 3 degenerate data, 4 inconclusive certificate, 5 certified
// negative.

#include <iosfwd>
#include <string>
#include <vector>

namespace emlab {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args);  // stdout / stderr

}  // namespace emlab
