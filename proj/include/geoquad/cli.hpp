#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geoquad {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `geoquad` tool. args excludes the program name.
/// Returns 0 on success, 1 on monitor violations or an aborted run, 2 on
/// usage or config errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoquad
