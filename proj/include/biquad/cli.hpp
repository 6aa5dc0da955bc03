#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biquad::cli {

// Runs the command-line surface on the given arguments (without argv[0]).
// Exit codes: 0 success, 1 check failure, 2 input error, 3 not-in-family.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biquad::cli
