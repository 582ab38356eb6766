#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace khop {

// Runs one khop invocation; args exclude the program name.
// Exit codes: 0 success, 1 failed verification (check), 2 usage or domain error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace khop
