#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsespace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitMismatch = 2;

// Runs one command line (args[0] is the program name) and returns the exit
// code. Regular output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparsespace::cli
