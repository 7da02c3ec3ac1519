#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace turnpike {

/// Runs one CLI invocation. `args` excludes the program name. Returns 0 on success,
/// 1 on a usage error and 2 on a runtime error.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace turnpike
