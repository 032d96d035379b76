//
// Command-line entry point, exposed as a function so tests can drive it
// in-process. Exit codes: 0 success, 1 configuration error, 2 protocol
// violation.
//
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csc {

int run_cli(std::vector<std::string> args, std::ostream &out, std::ostream &err);

} // namespace csc
