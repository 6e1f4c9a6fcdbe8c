#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wove {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one `wove` invocation. `args[0]` is the program name. Returns 0 on
/// success, 1 on a usage error, 2 on a data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wove
