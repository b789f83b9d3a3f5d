#pragma once

#include "devlore/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace devlore {

/// Loads a bug-corpus manifest. Relative paths are resolved against the manifest's
/// directory, which also becomes each bug's `base_dir`.
std::vector<BugCase> load_manifest(const std::filesystem::path& path);

/// Parses manifest text as if it lived in `base_dir`.
std::vector<BugCase> parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

/// Inverse of parse_manifest; paths are written relative to `base_dir` when they lie under it.
std::string serialize_manifest(const std::vector<BugCase>& bugs, const std::filesystem::path& base_dir);

/// True iff every artifact toggled on in `config` is present in `bundle`.
bool artifact_availability(const BugCase& bug, const ArtifactBundle& bundle, const ArtifactConfig& config);

/// Issue text for a bug, or nullopt when the manifest has none or the file is empty.
std::optional<std::string> read_issue(const BugCase& bug);

}  // namespace devlore
