#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace devlore {

/// `<class_path>::<member>`, e.g. `calc.number_utils.NumberUtils::create_number`.
struct MethodLocation {
  std::string class_path;
  std::string member;

  std::string to_string() const { return class_path + "::" + member; }
  /// Accepts the canonical form; a trailing parameter list on the member is stripped.
  static MethodLocation parse(std::string_view text);

  auto operator<=>(const MethodLocation&) const = default;
};

/// class_path -> sorted, unique, positive line numbers. std::map/std::set give the
/// canonical form directly, so `==` is the dedup equality.
struct LineLocationSet {
  std::map<std::string, std::set<int>> entries;

  bool empty() const { return entries.empty(); }
  std::size_t line_count() const;
  std::string to_string() const;

  auto operator<=>(const LineLocationSet&) const = default;
};

struct LineAnchor {
  std::string file;  // workspace-relative
  int line = 0;

  auto operator<=>(const LineAnchor&) const = default;
};

struct GroundTruth {
  std::filesystem::path dev_patch_path;
  std::vector<MethodLocation> buggy_methods;
  std::optional<LineAnchor> first_added_line;
  bool is_single_method = false;

  bool operator==(const GroundTruth&) const = default;
};

struct BugCase {
  std::string id;
  std::filesystem::path workspace_root;
  std::vector<std::string> failing_tests;
  std::string failing_test_command;
  std::string full_test_command;
  std::string tracer_command;
  std::optional<std::filesystem::path> issue_path;
  std::optional<GroundTruth> ground_truth;
  /// Directory commands run in; the manifest's directory.
  std::filesystem::path base_dir;

  bool operator==(const BugCase&) const = default;
};

struct ArtifactConfig {
  bool use_issue = false;
  bool use_stack = false;
  bool use_debug = false;

  /// `none` or a `+`-joined subset of {issue, stack, debug}; also accepts `,` as joiner.
  static ArtifactConfig parse(std::string_view text);
  /// `;`-separated list of configs.
  static std::vector<ArtifactConfig> parse_list(std::string_view text);
  /// Canonical label: `none`, `issue`, `issue+stack`, `issue+stack+debug`, ...
  std::string label() const;

  auto operator<=>(const ArtifactConfig&) const = default;
};

struct RelatedMethod {
  std::string class_path;
  std::string member;
  std::string signature;
  std::string file;  // workspace-relative
  int declaration_line = 0;

  MethodLocation location() const { return {class_path, member}; }
  bool operator==(const RelatedMethod&) const = default;
};

struct RelatedMethods {
  /// First-execution order, unique on (class_path, member, signature).
  std::vector<RelatedMethod> methods;

  /// class_path -> indices into `methods`, classes in first-appearance order.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> grouped_by_class() const;
  const RelatedMethod* find(const MethodLocation& loc) const;
  bool empty() const { return methods.empty(); }

  bool operator==(const RelatedMethods&) const = default;
};

struct StepEvent {
  std::string class_path;
  std::string member;
  int line = 0;
  /// name -> JSON-encoded value text, in first-assignment order.
  std::vector<std::pair<std::string, std::string>> changed_vars;

  bool operator==(const StepEvent&) const = default;
};

struct DebugTrace {
  std::vector<StepEvent> events;
  std::vector<MethodLocation> scope;

  bool operator==(const DebugTrace&) const = default;
};

struct ArtifactBundle {
  RelatedMethods related_methods;
  std::optional<std::string> issue;
  std::optional<std::string> error_stack;
  std::optional<DebugTrace> debug;
  ArtifactConfig config;
};

}  // namespace devlore
