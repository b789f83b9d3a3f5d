#pragma once

#include "devlore/response.hpp"
#include "devlore/temp_dir.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace devlore {

struct PatchResult {
  std::vector<std::string> modified_files;  // workspace-relative, sorted
  std::string unified_diff;
  int applied_blocks = 0;

  bool operator==(const PatchResult&) const = default;
};

/// Applies blocks in order against the evolving file state. Each block's search lines
/// are located by the first matching tier (exact, then trailing whitespace ignored, then
/// runs of blanks collapsed); two or more matches at that tier raise AmbiguousMatch.
/// Nothing is written unless every block applies.
PatchResult apply_edit_script(const std::filesystem::path& workspace, const EditScript& script);

/// A private copy of a bug workspace that can be restored to its pristine bytes.
class WorkspaceCopy {
 public:
  explicit WorkspaceCopy(const std::filesystem::path& source);

  const std::filesystem::path& path() const { return root_; }

  PatchResult apply(const EditScript& script);

  /// Restores the pristine tree. Files created since the copy was made are removed;
  /// a tracked file whose bytes match neither the pristine nor the patched state
  /// raises RevertFailed.
  void revert();

 private:
  TempDir dir_;
  std::filesystem::path source_;
  std::filesystem::path root_;
  std::map<std::string, std::string> pristine_;  // relative path -> sha256
  std::map<std::string, std::string> patched_;
};

}  // namespace devlore
