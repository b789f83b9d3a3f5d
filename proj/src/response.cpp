#include "devlore/response.hpp"

#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <algorithm>
#include <optional>
#include <regex>
#include <set>

namespace devlore {
namespace {

namespace fs = std::filesystem;

const std::regex kMethodLocation(R"(([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)::([A-Za-z_$<][\w$<>]*))");
const std::regex kLineEntry(R"(^line\s*:?\s*(\d+)\s*[,.;]?$)", std::regex::icase);
const std::regex kClassHeader(R"(^([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)\s*:?$)");
const std::regex kInlineEntry(R"(^([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)\s*[:,]?\s+line\s*:?\s*(\d+)\s*$)",
                              std::regex::icase);
const std::regex kSearchMarker(R"(^\s*<{7}\s*SEARCH\s*$)");
const std::regex kDivider(R"(^\s*={7}\s*$)");
const std::regex kReplaceMarker(R"(^\s*>{7}\s*REPLACE\s*$)");
const std::regex kFence(R"(^\s*(```|~~~).*$)");

// Strips list bullets, heading hashes, emphasis and inline-code markup around a line.
std::string strip_markup(std::string_view raw) {
  std::string s(text::trim(raw));
  static const std::regex kLead(R"(^(?:[-*+]\s+|\d+[.)]\s+|#+\s*)+)");
  s = std::regex_replace(s, kLead, "");
  auto strip_wrapping = [&s](std::string_view w) {
    while (s.size() >= 2 * w.size() && text::starts_with(s, w) && text::ends_with(s, w)) {
      s = std::string(text::trim(s.substr(w.size(), s.size() - 2 * w.size())));
    }
  };
  strip_wrapping("**");
  strip_wrapping("`");
  strip_wrapping("**");
  return s;
}

std::string path_from_label(std::string_view raw) {
  auto s = strip_markup(raw);
  static const std::regex kLabel(R"(^(?:file(?:\s*path)?|path)\s*:\s*)", std::regex::icase);
  s = std::regex_replace(s, kLabel, "");
  s = strip_markup(s);
  return s;
}

std::string rstrip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<MethodLocation> parse_method_locations(std::string_view response) {
  std::vector<MethodLocation> out;
  for (const auto& line : text::split_lines(response)) {
    for (std::sregex_iterator it(line.begin(), line.end(), kMethodLocation), end; it != end; ++it) {
      MethodLocation loc{(*it)[1].str(), (*it)[2].str()};
      if (std::find(out.begin(), out.end(), loc) == out.end()) out.push_back(std::move(loc));
    }
  }
  if (out.empty()) throw Error(ErrorCode::NoLocationsFound, "no class::member locations in response");
  return out;
}

LineLocationSet parse_line_locations(std::string_view response) {
  LineLocationSet out;
  std::optional<std::string> header;
  for (const auto& raw : text::split_lines(response)) {
    auto line = strip_markup(raw);
    if (line.empty() || std::regex_match(line, kFence)) continue;
    std::smatch m;
    if (std::regex_match(line, m, kLineEntry)) {
      if (!header) throw Error(ErrorCode::OrphanLineEntry, "line entry without a class header: " + line);
      int n = std::stoi(m[1].str());
      if (n > 0) out.entries[*header].insert(n);
      continue;
    }
    if (std::regex_match(line, m, kInlineEntry)) {
      header = m[1].str();
      int n = std::stoi(m[2].str());
      if (n > 0) out.entries[*header].insert(n);
      continue;
    }
    if (std::regex_match(line, m, kClassHeader)) header = m[1].str();
  }
  if (out.empty()) throw Error(ErrorCode::NoLocationsFound, "no line locations in response");
  return out;
}

std::vector<LineLocationSet> dedup_location_sets(const std::vector<LineLocationSet>& sets) {
  std::vector<LineLocationSet> out;
  std::set<LineLocationSet> seen;
  for (const auto& s : sets) {
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

EditScript parse_edit_script(std::string_view response, std::string source_response_id) {
  EditScript script;
  script.source_response_id = std::move(source_response_id);
  auto lines = text::split_lines(response);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!std::regex_match(lines[i], kSearchMarker)) {
      if (std::regex_match(lines[i], kDivider) || std::regex_match(lines[i], kReplaceMarker)) {
        throw Error(ErrorCode::MalformedEditBlock, "marker outside a block at response line " + std::to_string(i + 1));
      }
      continue;
    }
    EditBlock block;
    for (std::size_t j = i; j-- > 0;) {
      if (text::trim(lines[j]).empty() || std::regex_match(lines[j], kFence)) continue;
      block.file_path = path_from_label(lines[j]);
      break;
    }
    if (block.file_path.empty()) {
      throw Error(ErrorCode::MalformedEditBlock, "no file path above block at response line " + std::to_string(i + 1));
    }
    std::size_t j = i + 1;
    for (; j < lines.size(); ++j) {
      if (std::regex_match(lines[j], kDivider)) break;
      if (std::regex_match(lines[j], kSearchMarker) || std::regex_match(lines[j], kReplaceMarker)) {
        throw Error(ErrorCode::MalformedEditBlock, "divider missing in block for " + block.file_path);
      }
      block.search_lines.push_back(rstrip_cr(lines[j]));
    }
    if (j == lines.size()) throw Error(ErrorCode::MalformedEditBlock, "unterminated block for " + block.file_path);
    for (++j; j < lines.size(); ++j) {
      if (std::regex_match(lines[j], kReplaceMarker)) break;
      if (std::regex_match(lines[j], kSearchMarker) || std::regex_match(lines[j], kDivider)) {
        throw Error(ErrorCode::MalformedEditBlock, "replace marker missing in block for " + block.file_path);
      }
      block.replace_lines.push_back(rstrip_cr(lines[j]));
    }
    if (j == lines.size()) throw Error(ErrorCode::MalformedEditBlock, "unterminated block for " + block.file_path);
    if (block.search_lines.empty()) {
      throw Error(ErrorCode::MalformedEditBlock, "empty search section in block for " + block.file_path);
    }
    script.blocks.push_back(std::move(block));
    i = j;
  }
  if (script.blocks.empty()) throw Error(ErrorCode::NoEditBlocks, "no SEARCH/REPLACE blocks in response");
  return script;
}

std::string render_edit_script(const EditScript& script) {
  std::string out;
  for (const auto& b : script.blocks) {
    if (!out.empty()) out += '\n';
    out += b.file_path + "\n<<<<<<< SEARCH\n";
    for (const auto& l : b.search_lines) out += l + '\n';
    out += "=======\n";
    for (const auto& l : b.replace_lines) out += l + '\n';
    out += ">>>>>>> REPLACE\n";
  }
  return out;
}

std::string resolve_class_file(const std::string& class_path, const RelatedMethods& related,
                               const fs::path& workspace_root) {
  std::set<std::string> indexed;
  for (const auto& m : related.methods) {
    if (m.class_path == class_path) indexed.insert(m.file);
  }
  if (indexed.size() == 1) return *indexed.begin();
  if (indexed.size() > 1) {
    throw Error(ErrorCode::AmbiguousClassPath, class_path + " maps to " + std::to_string(indexed.size()) + " files");
  }

  std::vector<std::string> parts;
  for (std::size_t start = 0;;) {
    auto dot = class_path.find('.', start);
    parts.push_back(class_path.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  // depth (number of dotted components matched) -> candidate files
  std::map<std::size_t, std::set<std::string>> candidates;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(workspace_root, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file(ec)) continue;
    auto rel = fs::relative(it->path(), workspace_root, ec);
    if (ec) continue;
    auto stem_path = (rel.parent_path() / rel.stem()).generic_string();
    std::string dotted = stem_path;
    std::replace(dotted.begin(), dotted.end(), '/', '.');
    for (std::size_t depth = parts.size(); depth >= 1; --depth) {
      std::vector<std::string> prefix(parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(depth));
      auto want = text::join(prefix, ".");
      // a source root such as `src/` may precede the package path
      if (dotted == want || text::ends_with(dotted, "." + want)) {
        candidates[depth].insert(rel.generic_string());
        break;
      }
    }
  }
  if (candidates.empty()) return {};
  const auto& best = candidates.rbegin()->second;
  if (best.size() > 1) {
    throw Error(ErrorCode::AmbiguousClassPath, class_path + " matches " + text::join({best.begin(), best.end()}, ", "));
  }
  return *best.begin();
}

}  // namespace devlore
