#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vsplit::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitError = 2;

// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnv = "VERTISPLIT_THREADS";

// Runs the tool with args[0] as the program name. JSON reports go to `out`,
// diagnostics to `err` as "error: <kind>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vsplit::cli
