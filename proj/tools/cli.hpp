#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace devlore::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitHarness = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. Exit 0 on completion (unfixed bugs included),
/// 2 on usage errors, 1 on harness failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace devlore::cli
