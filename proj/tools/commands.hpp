#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace causattr::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitModel = 2;
inline constexpr int kExitIo = 3;

// Runs one command line (args exclude the program name). Results go to out
// unless --out names a file; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace causattr::cli
