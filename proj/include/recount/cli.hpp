#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace recount::cli {

// Exit codes of the `recount` tool.
inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 2;
inline constexpr int kResourceLimit = 3;
inline constexpr int kUnsupported = 4;
inline constexpr int kInternalError = 5;

// Runs one command line (without the program name). Reports go to `out`
// as JSON (CSV for bench), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recount::cli
