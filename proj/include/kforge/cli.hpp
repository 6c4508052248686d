#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kforge::cli {

/// Runs one command line (without the program name). Exit codes: 0 success, 1 numerical
/// failure or failed check, 2 usage, input or domain error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kforge::cli
