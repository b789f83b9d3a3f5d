#include "devlore/record.hpp"

#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace devlore {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json to_json(const MethodLocation& m) { return m.to_string(); }

json to_json(const LineLocationSet& s) {
  json out = json::object();
  for (const auto& [cls, lines] : s.entries) out[cls] = std::vector<int>(lines.begin(), lines.end());
  return out;
}

LineLocationSet line_set_from(const json& j) {
  LineLocationSet s;
  for (const auto& [cls, lines] : j.items()) {
    auto v = lines.get<std::vector<int>>();
    s.entries[cls] = std::set<int>(v.begin(), v.end());
  }
  return s;
}

json to_json(const EditScript& script) {
  json blocks = json::array();
  for (const auto& b : script.blocks) {
    blocks.push_back({{"file", b.file_path}, {"search", b.search_lines}, {"replace", b.replace_lines}});
  }
  return {{"blocks", blocks}, {"source_response_id", script.source_response_id}};
}

EditScript script_from(const json& j) {
  EditScript s;
  s.source_response_id = j.at("source_response_id").get<std::string>();
  for (const auto& b : j.at("blocks")) {
    s.blocks.push_back({b.at("file").get<std::string>(), b.at("search").get<std::vector<std::string>>(),
                        b.at("replace").get<std::vector<std::string>>()});
  }
  return s;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json();
}

template <class T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json to_json(const Verdict& v) {
  return {{"classification", classification_name(v.classification)},
          {"failing_tests_passed", v.failing_tests_passed},
          {"full_suite_passed", optional_json(v.full_suite_passed)},
          {"failing_run_seconds", v.failing_run_seconds},
          {"full_run_seconds", optional_json(v.full_run_seconds)},
          {"failing_run_output", v.failing_run_output},
          {"full_run_output", optional_json(v.full_run_output)},
          {"full_suite_retried", v.full_suite_retried}};
}

Verdict verdict_from(const json& j) {
  Verdict v;
  v.classification = parse_classification(j.at("classification").get<std::string>());
  v.failing_tests_passed = j.at("failing_tests_passed").get<bool>();
  v.full_suite_passed = optional_from<bool>(j, "full_suite_passed");
  v.failing_run_seconds = j.at("failing_run_seconds").get<double>();
  v.full_run_seconds = optional_from<double>(j, "full_run_seconds");
  v.failing_run_output = j.at("failing_run_output").get<std::string>();
  v.full_run_output = optional_from<std::string>(j, "full_run_output");
  v.full_suite_retried = j.at("full_suite_retried").get<bool>();
  return v;
}

std::string diff_name(const std::string& label, const PatchAttempt& p) {
  return label + ".r" + std::to_string(p.round) + ".s" + std::to_string(p.sample) + ".diff";
}

json to_json(const PatchAttempt& p, const std::string& diff_file) {
  json j = {{"round", p.round},
            {"sample", p.sample},
            {"response", p.response_name},
            {"script", p.script ? to_json(*p.script) : json()},
            {"error", optional_json(p.error)},
            {"verdict", p.verdict ? to_json(*p.verdict) : json()},
            {"patch", json()}};
  if (p.patch) {
    j["patch"] = {{"modified_files", p.patch->modified_files},
                  {"applied_blocks", p.patch->applied_blocks},
                  {"unified_diff", p.patch->unified_diff},
                  {"diff_file", diff_file}};
  }
  return j;
}

PatchAttempt attempt_from(const json& j) {
  PatchAttempt p;
  p.round = j.at("round").get<int>();
  p.sample = j.at("sample").get<int>();
  p.response_name = j.at("response").get<std::string>();
  if (!j.at("script").is_null()) p.script = script_from(j.at("script"));
  p.error = optional_from<std::string>(j, "error");
  if (!j.at("verdict").is_null()) p.verdict = verdict_from(j.at("verdict"));
  if (!j.at("patch").is_null()) {
    const auto& pj = j.at("patch");
    p.patch = PatchResult{pj.at("modified_files").get<std::vector<std::string>>(), pj.at("unified_diff").get<std::string>(),
                          pj.at("applied_blocks").get<int>()};
  }
  return p;
}

json to_json(const UsageRecord& u) {
  return {{"stage", u.stage},
          {"input_tokens", u.input_tokens},
          {"output_tokens", u.output_tokens},
          {"cost", u.cost.to_string()},
          {"wall_time", u.wall_time},
          {"request_id", u.request_id}};
}

UsageRecord usage_from(const json& j) {
  UsageRecord u;
  u.stage = j.at("stage").get<std::string>();
  u.input_tokens = j.at("input_tokens").get<long>();
  u.output_tokens = j.at("output_tokens").get<long>();
  u.cost = Money::parse(j.at("cost").get<std::string>());
  u.wall_time = j.at("wall_time").get<double>();
  u.request_id = j.at("request_id").get<std::string>();
  return u;
}

json archive_refs(const std::vector<ArchivedText>& texts, const std::string& label) {
  json out = json::array();
  for (const auto& t : texts) out.push_back({{"name", t.name}, {"path", label + "/" + t.name}});
  return out;
}

std::vector<ArchivedText> archive_from(const json& refs, const fs::path& base) {
  std::vector<ArchivedText> out;
  for (const auto& r : refs) {
    auto path = base / r.at("path").get<std::string>();
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      throw Error(ErrorCode::MalformedRecord, "archived text missing: " + r.at("path").get<std::string>());
    }
    out.push_back({r.at("name").get<std::string>(), text::read_file(path)});
  }
  return out;
}

void check_archive_name(const std::string& name) {
  if (name.empty() || name.find('/') != std::string::npos || name.find("..") != std::string::npos) {
    throw Error(ErrorCode::PreconditionViolated, "archive names are plain file names: " + name);
  }
}

}  // namespace

bool TrialRecord::plausible() const {
  return std::any_of(patches.begin(), patches.end(), [](const PatchAttempt& p) { return p.plausible(); });
}

int TrialRecord::samples_for(const std::string& stage) const {
  return static_cast<int>(std::count_if(usage.begin(), usage.end(), [&](const UsageRecord& u) { return u.stage == stage; }));
}

fs::path trial_record_path(const fs::path& out_dir, const std::string& bug_id, const ArtifactConfig& config) {
  return out_dir / "trials" / bug_id / (config.label() + ".json");
}

void write_trial_record(const fs::path& out_dir, const TrialRecord& r) {
  auto label = r.config.label();
  auto json_path = trial_record_path(out_dir, r.bug_id, r.config);
  auto text_dir = json_path.parent_path() / label;
  std::error_code ec;
  fs::remove_all(text_dir, ec);
  fs::create_directories(text_dir);
  for (const auto* texts : {&r.prompts, &r.responses}) {
    for (const auto& t : *texts) {
      check_archive_name(t.name);
      text::write_file(text_dir / t.name, t.text);
    }
  }
  auto patch_dir = out_dir / "patches" / r.bug_id;
  for (const auto& p : r.patches) {
    if (!p.patch) continue;
    fs::create_directories(patch_dir);
    text::write_file(patch_dir / diff_name(label, p), p.patch->unified_diff);
  }

  json j;
  j["bug_id"] = r.bug_id;
  j["config"] = label;
  j["available"] = r.available;
  j["unavailable_reason"] = r.unavailable_reason;
  j["seed_label"] = r.seed_label;
  j["plausible"] = r.plausible();
  j["predicted_methods"] = json::array();
  for (const auto& m : r.predicted_methods) j["predicted_methods"].push_back(to_json(m));
  j["methods_used"] = json::array();
  for (const auto& m : r.methods_used) j["methods_used"].push_back(to_json(m));
  j["methods_dropped"] = r.methods_dropped;
  j["line_samples"] = r.line_samples;
  j["line_parse_failures"] = r.line_parse_failures;
  j["unique_line_sets"] = json::array();
  for (const auto& s : r.unique_line_sets) j["unique_line_sets"].push_back(to_json(s));
  j["class_files"] = r.class_files;
  j["patches"] = json::array();
  for (const auto& p : r.patches) {
    j["patches"].push_back(to_json(p, "../../patches/" + r.bug_id + "/" + diff_name(label, p)));
  }
  j["skipped_patch_samples"] = r.skipped_patch_samples;
  j["usage"] = json::array();
  for (const auto& u : r.usage) j["usage"].push_back(to_json(u));
  j["stage_timings"] = r.stage_timings;
  j["errors"] = json::array();
  for (const auto& e : r.errors) j["errors"].push_back({{"stage", e.stage}, {"message", e.message}});
  j["prompts"] = archive_refs(r.prompts, label);
  j["responses"] = archive_refs(r.responses, label);
  text::write_file_atomic(json_path, j.dump(2) + "\n");
}

TrialRecord read_trial_record(const fs::path& json_path) {
  std::string raw;
  try {
    raw = text::read_file(json_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  auto j = json::parse(raw, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::MalformedRecord, "not JSON: " + json_path.filename().string());
  try {
    TrialRecord r;
    r.bug_id = j.at("bug_id").get<std::string>();
    r.config = ArtifactConfig::parse(j.at("config").get<std::string>());
    r.available = j.at("available").get<bool>();
    r.unavailable_reason = j.at("unavailable_reason").get<std::string>();
    r.seed_label = j.at("seed_label").get<std::string>();
    for (const auto& m : j.at("predicted_methods")) r.predicted_methods.push_back(MethodLocation::parse(m.get<std::string>()));
    for (const auto& m : j.at("methods_used")) r.methods_used.push_back(MethodLocation::parse(m.get<std::string>()));
    r.methods_dropped = j.at("methods_dropped").get<int>();
    r.line_samples = j.at("line_samples").get<int>();
    r.line_parse_failures = j.at("line_parse_failures").get<int>();
    for (const auto& s : j.at("unique_line_sets")) r.unique_line_sets.push_back(line_set_from(s));
    r.class_files = j.at("class_files").get<std::map<std::string, std::string>>();
    for (const auto& p : j.at("patches")) r.patches.push_back(attempt_from(p));
    r.skipped_patch_samples = j.at("skipped_patch_samples").get<int>();
    for (const auto& u : j.at("usage")) r.usage.push_back(usage_from(u));
    r.stage_timings = j.at("stage_timings").get<std::map<std::string, double>>();
    for (const auto& e : j.at("errors")) r.errors.push_back({e.at("stage").get<std::string>(), e.at("message").get<std::string>()});
    auto base = json_path.parent_path();
    r.prompts = archive_from(j.at("prompts"), base);
    r.responses = archive_from(j.at("responses"), base);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, json_path.filename().string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedRecord) throw;
    throw Error(ErrorCode::MalformedRecord, json_path.filename().string() + ": " + e.what());
  }
}

std::vector<TrialRecord> read_trial_records(const fs::path& out_dir) {
  std::vector<fs::path> paths;
  auto root = out_dir / "trials";
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return {};
  for (const auto& bug_dir : fs::directory_iterator(root)) {
    if (!bug_dir.is_directory()) continue;
    for (const auto& entry : fs::directory_iterator(bug_dir.path())) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") paths.push_back(entry.path());
    }
  }
  std::vector<TrialRecord> out;
  for (const auto& p : paths) out.push_back(read_trial_record(p));
  std::sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::pair(a.bug_id, a.config.label()) < std::pair(b.bug_id, b.config.label());
  });
  return out;
}

}  // namespace devlore
