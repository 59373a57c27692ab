#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pitest::cli {

/// Runs the command line (args excludes the program name). Exit codes:
/// 0 success, 2 input or configuration error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pitest::cli
