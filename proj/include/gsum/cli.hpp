#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsum::cli {

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;

// Runs one command line (without the program name). Reports go to out, or
// to the --out path; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsum::cli
