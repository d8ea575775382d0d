#pragma once

#include <string>
#include <vector>

namespace stylegap::cli {

// Exit codes: 0 success, 2 input error, 3 credential error, 4 missing
// intermediate, 1 anything else. `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace stylegap::cli
