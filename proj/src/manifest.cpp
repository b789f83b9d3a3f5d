#include "devlore/manifest.hpp"

#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace devlore {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

std::string relativize(const fs::path& p, const fs::path& base) {
  auto rel = p.lexically_relative(base);
  if (rel.empty() || text::starts_with(rel.generic_string(), "..")) return p.generic_string();
  return rel.generic_string();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::MalformedManifest, where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw Error(ErrorCode::MalformedManifest, where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

GroundTruth parse_ground_truth(const json& j, const fs::path& base, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedManifest, where + ": ground_truth must be an object or null");
  GroundTruth gt;
  gt.dev_patch_path = resolve(base, require_string(j, "dev_patch", where));
  const auto& methods = require(j, "buggy_methods", where);
  if (!methods.is_array() || methods.empty()) {
    throw Error(ErrorCode::MalformedManifest, where + ": buggy_methods must be a non-empty array");
  }
  for (const auto& m : methods) {
    if (!m.is_string()) throw Error(ErrorCode::MalformedManifest, where + ": buggy_methods entries must be strings");
    try {
      gt.buggy_methods.push_back(MethodLocation::parse(m.get<std::string>()));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedManifest, where + ": " + e.what());
    }
  }
  if (auto it = j.find("first_added_line"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(ErrorCode::MalformedManifest, where + ": first_added_line must be an object");
    LineAnchor anchor;
    anchor.file = require_string(*it, "file", where);
    const auto& line = require(*it, "line", where);
    if (!line.is_number_integer() || line.get<int>() <= 0) {
      throw Error(ErrorCode::MalformedManifest, where + ": first_added_line.line must be a positive integer");
    }
    anchor.line = line.get<int>();
    gt.first_added_line = anchor;
  }
  const auto& single = require(j, "single_method", where);
  if (!single.is_boolean()) throw Error(ErrorCode::MalformedManifest, where + ": single_method must be a boolean");
  gt.is_single_method = single.get<bool>();
  return gt;
}

}  // namespace

std::vector<BugCase> parse_manifest(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedManifest, std::string("unparseable manifest: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("bugs") || !doc["bugs"].is_array()) {
    throw Error(ErrorCode::MalformedManifest, "manifest must be an object with a 'bugs' array");
  }

  std::vector<BugCase> bugs;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc["bugs"].size(); ++i) {
    const auto& b = doc["bugs"][i];
    std::string where = "bugs[" + std::to_string(i) + "]";
    if (!b.is_object()) throw Error(ErrorCode::MalformedManifest, where + " must be an object");

    BugCase bug;
    bug.base_dir = base_dir;
    bug.id = require_string(b, "id", where);
    if (bug.id.empty()) throw Error(ErrorCode::MalformedManifest, where + ": empty id");
    where += " (" + bug.id + ")";
    if (!seen.insert(bug.id).second) throw Error(ErrorCode::DuplicateBugId, "duplicate bug id '" + bug.id + "'");

    bug.workspace_root = resolve(base_dir, require_string(b, "workspace", where));
    const auto& tests = require(b, "failing_tests", where);
    if (!tests.is_array() || tests.empty()) {
      throw Error(ErrorCode::MalformedManifest, where + ": failing_tests must be a non-empty array");
    }
    for (const auto& t : tests) {
      if (!t.is_string()) throw Error(ErrorCode::MalformedManifest, where + ": failing_tests entries must be strings");
      bug.failing_tests.push_back(t.get<std::string>());
    }
    bug.failing_test_command = require_string(b, "failing_test_command", where);
    bug.full_test_command = require_string(b, "full_test_command", where);
    bug.tracer_command = require_string(b, "tracer_command", where);
    if (auto it = b.find("issue"); it != b.end() && !it->is_null()) {
      if (!it->is_string()) throw Error(ErrorCode::MalformedManifest, where + ": issue must be a string or null");
      bug.issue_path = resolve(base_dir, it->get<std::string>());
    }
    if (auto it = b.find("ground_truth"); it != b.end() && !it->is_null()) {
      bug.ground_truth = parse_ground_truth(*it, base_dir, where);
    }

    std::error_code ec;
    if (!fs::is_directory(bug.workspace_root, ec)) {
      throw Error(ErrorCode::MissingWorkspace,
                  "workspace for '" + bug.id + "' does not exist: " + bug.workspace_root.string());
    }
    bugs.push_back(std::move(bug));
  }
  return bugs;
}

std::vector<BugCase> load_manifest(const fs::path& path) {
  std::string content;
  try {
    content = text::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedManifest, e.what());
  }
  return parse_manifest(content, fs::absolute(path).parent_path().lexically_normal());
}

std::string serialize_manifest(const std::vector<BugCase>& bugs, const fs::path& base_dir) {
  json arr = json::array();
  for (const auto& bug : bugs) {
    json b;
    b["id"] = bug.id;
    b["workspace"] = relativize(bug.workspace_root, base_dir);
    b["failing_tests"] = bug.failing_tests;
    b["failing_test_command"] = bug.failing_test_command;
    b["full_test_command"] = bug.full_test_command;
    b["tracer_command"] = bug.tracer_command;
    b["issue"] = bug.issue_path ? json(relativize(*bug.issue_path, base_dir)) : json(nullptr);
    if (bug.ground_truth) {
      const auto& gt = *bug.ground_truth;
      json g;
      g["dev_patch"] = relativize(gt.dev_patch_path, base_dir);
      json methods = json::array();
      for (const auto& m : gt.buggy_methods) methods.push_back(m.to_string());
      g["buggy_methods"] = methods;
      g["first_added_line"] = gt.first_added_line
                                  ? json{{"file", gt.first_added_line->file}, {"line", gt.first_added_line->line}}
                                  : json(nullptr);
      g["single_method"] = gt.is_single_method;
      b["ground_truth"] = g;
    } else {
      b["ground_truth"] = nullptr;
    }
    arr.push_back(std::move(b));
  }
  return json{{"bugs", arr}}.dump(2) + "\n";
}

bool artifact_availability(const BugCase&, const ArtifactBundle& bundle, const ArtifactConfig& config) {
  if (config.use_issue && !bundle.issue) return false;
  if (config.use_stack && !bundle.error_stack) return false;
  if (config.use_debug && !bundle.debug) return false;
  return true;
}

std::optional<std::string> read_issue(const BugCase& bug) {
  if (!bug.issue_path) return std::nullopt;
  std::error_code ec;
  if (!fs::is_regular_file(*bug.issue_path, ec)) return std::nullopt;
  auto content = text::read_file(*bug.issue_path);
  if (text::trim(content).empty()) return std::nullopt;
  return content;
}

}  // namespace devlore
