#pragma once

#include <string>
#include <vector>

namespace segmenter {

// Full command-line driver. `args` excludes the program name. Returns the
// process exit code: 0 success, 1 usage error, 2 runtime failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace segmenter
