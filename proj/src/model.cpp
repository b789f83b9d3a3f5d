#include "devlore/model.hpp"

#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <algorithm>

namespace devlore {

MethodLocation MethodLocation::parse(std::string_view text) {
  auto t = text::trim(text);
  auto sep = t.find("::");
  if (sep == std::string_view::npos) {
    throw Error(ErrorCode::PreconditionViolated, "method location lacks '::': " + std::string(t));
  }
  std::string class_path(text::trim(t.substr(0, sep)));
  std::string member(text::trim(t.substr(sep + 2)));
  if (auto paren = member.find('('); paren != std::string::npos) member = std::string(text::rtrim(member.substr(0, paren)));
  if (class_path.empty() || member.empty()) {
    throw Error(ErrorCode::PreconditionViolated, "empty part in method location: " + std::string(t));
  }
  return {std::move(class_path), std::move(member)};
}

std::size_t LineLocationSet::line_count() const {
  std::size_t n = 0;
  for (const auto& [cls, lines] : entries) n += lines.size();
  return n;
}

std::string LineLocationSet::to_string() const {
  std::string out;
  for (const auto& [cls, lines] : entries) {
    out += cls;
    out += '\n';
    for (int line : lines) {
      out += "  line: ";
      out += std::to_string(line);
      out += '\n';
    }
  }
  return out;
}

ArtifactConfig ArtifactConfig::parse(std::string_view text) {
  auto t = text::trim(text);
  if (t.empty()) throw Error(ErrorCode::InvalidArtifactConfig, "empty artifact config");
  ArtifactConfig cfg;
  if (t == "none" || t == "---") return cfg;
  std::size_t start = 0;
  while (start <= t.size()) {
    auto end = t.find_first_of("+,", start);
    if (end == std::string_view::npos) end = t.size();
    auto token = text::trim(t.substr(start, end - start));
    if (token == "issue") {
      cfg.use_issue = true;
    } else if (token == "stack") {
      cfg.use_stack = true;
    } else if (token == "debug") {
      cfg.use_debug = true;
    } else {
      throw Error(ErrorCode::InvalidArtifactConfig,
                  "unknown artifact token '" + std::string(token) + "' (expected none, issue, stack, debug)");
    }
    start = end + 1;
  }
  return cfg;
}

std::vector<ArtifactConfig> ArtifactConfig::parse_list(std::string_view text) {
  std::vector<ArtifactConfig> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = text::trim(text.substr(start, end - start));
    if (!item.empty()) {
      auto cfg = parse(item);
      if (std::find(out.begin(), out.end(), cfg) == out.end()) out.push_back(cfg);
    }
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArtifactConfig, "no artifact configs given");
  return out;
}

std::string ArtifactConfig::label() const {
  std::vector<std::string> parts;
  if (use_issue) parts.emplace_back("issue");
  if (use_stack) parts.emplace_back("stack");
  if (use_debug) parts.emplace_back("debug");
  if (parts.empty()) return "none";
  return text::join(parts, "+");
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> RelatedMethods::grouped_by_class() const {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == methods[i].class_path; });
    if (it == groups.end()) {
      groups.push_back({methods[i].class_path, {i}});
    } else {
      it->second.push_back(i);
    }
  }
  return groups;
}

const RelatedMethod* RelatedMethods::find(const MethodLocation& loc) const {
  // Overloads collapse to the first-entered one; responses carry no signatures.
  for (const auto& m : methods) {
    if (m.class_path == loc.class_path && m.member == loc.member) return &m;
  }
  return nullptr;
}

}  // namespace devlore
