#pragma once

#include "devlore/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace devlore {

struct EditBlock {
  std::string file_path;  // workspace-relative, as written by the model
  std::vector<std::string> search_lines;  // never empty
  std::vector<std::string> replace_lines;

  bool operator==(const EditBlock&) const = default;
};

struct EditScript {
  std::vector<EditBlock> blocks;
  std::string source_response_id;

  bool operator==(const EditScript&) const = default;
};

/// Every `<dotted path>::<identifier>` occurrence, first occurrence order, deduplicated.
/// Throws NoLocationsFound when there is none.
std::vector<MethodLocation> parse_method_locations(std::string_view response);

/// Class header lines followed by `line: N` entries. A `line:` entry before any header
/// raises OrphanLineEntry; no entries at all raises NoLocationsFound.
LineLocationSet parse_line_locations(std::string_view response);

/// Collapses canonically equal sets, keeping first occurrences in order.
std::vector<LineLocationSet> dedup_location_sets(const std::vector<LineLocationSet>& sets);

/// Parses SEARCH/REPLACE blocks. Text outside blocks is ignored.
/// Throws MalformedEditBlock or NoEditBlocks.
EditScript parse_edit_script(std::string_view response, std::string source_response_id = {});

/// The textual block format the repair prompt asks for; parse_edit_script inverts it.
std::string render_edit_script(const EditScript& script);

/// Maps a class path from a line-localization answer to a workspace-relative file.
/// The related-methods index wins; otherwise the workspace is scanned for a file whose
/// extension-less path ends with the longest matching dotted prefix of the class path.
/// Several candidates raise AmbiguousClassPath; none yields "".
std::string resolve_class_file(const std::string& class_path, const RelatedMethods& related,
                               const std::filesystem::path& workspace_root);

}  // namespace devlore
