#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bisyz {

// One command-line invocation; `args` excludes the program name.
// Exit status: 0 success, 2 hypothesis violation, 1 error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bisyz
