#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prev::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// Runs one invocation. `args` excludes the program name. Data goes to
/// `out` (or to files), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prev::cli
