#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "devlore/model.hpp"

namespace devlore::testing {

std::filesystem::path data_dir();

/// relative path -> sha256 of content, for byte-identity checks of a tree.
std::map<std::string, std::string> tree_hashes(const std::filesystem::path& root);

void write(const std::filesystem::path& path, const std::string& content);

/// The bundled sample corpus.
std::filesystem::path corpus_manifest();
std::vector<BugCase> corpus_bugs();
BugCase corpus_bug(const std::string& id);

/// Applies the bug's developer diff to `workspace` with patch(1).
void apply_dev_patch(const BugCase& bug, const std::filesystem::path& workspace);

}  // namespace devlore::testing
