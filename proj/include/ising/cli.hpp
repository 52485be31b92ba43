#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ising {

/// Exit codes: 0 success, 1 failed verification, 2 usage or validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command; `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "start:stop:step" (stop included when hit exactly), a comma list, or one value.
std::vector<int> parse_n_grid(const std::string& text);

}  // namespace ising
