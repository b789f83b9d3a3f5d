#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace devlore::diff {

enum class Op { Equal, Delete, Insert };

struct Edit {
  Op op;
  std::size_t old_index;  // valid for Equal and Delete
  std::size_t new_index;  // valid for Equal and Insert
};

/// Minimal line edit sequence (Myers). Equal runs come before Delete before Insert
/// within each change region.
std::vector<Edit> diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Splits text into lines that keep their terminators, so a missing final newline is
/// visible as a last line without '\n'.
std::vector<std::string> split_keep_ends(std::string_view text);

/// Standard unified diff with `a/` and `b/` prefixes and `context` lines around each
/// change. Returns "" when the texts are equal.
std::string unified_diff(const std::string& path, std::string_view before, std::string_view after,
                         std::size_t context = 3);

}  // namespace devlore::diff
