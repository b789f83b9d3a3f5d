#pragma once

#include "devlore/llm_client.hpp"
#include "devlore/model.hpp"
#include "devlore/patch.hpp"
#include "devlore/response.hpp"
#include "devlore/validator.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace devlore {

inline constexpr const char* kStageRelatedMethods = "related_methods";
inline constexpr const char* kStageErrorStack = "error_stack";
inline constexpr const char* kStageMethodLocalization = "method_localization";
inline constexpr const char* kStageDebugTrace = "debug_trace";
inline constexpr const char* kStageLineLocalization = "line_localization";
inline constexpr const char* kStagePatchGeneration = "patch_generation";
inline constexpr const char* kStagePatchValidation = "patch_validation";

/// A prompt or raw response, named relative to the record's text directory.
struct ArchivedText {
  std::string name;
  std::string text;

  bool operator==(const ArchivedText&) const = default;
};

struct PatchAttempt {
  int round = 0;  // index into unique_line_sets, or 0 for the empty-hint round
  int sample = 0;
  std::string response_name;
  std::optional<EditScript> script;
  std::optional<PatchResult> patch;
  /// Parse, apply or harness failure; `verdict` is absent when set.
  std::optional<std::string> error;
  std::optional<Verdict> verdict;

  bool plausible() const { return verdict && verdict->classification == Classification::Plausible; }
  bool operator==(const PatchAttempt&) const = default;
};

struct StageError {
  std::string stage;
  std::string message;

  bool operator==(const StageError&) const = default;
};

struct TrialRecord {
  std::string bug_id;
  ArtifactConfig config;
  /// False when an artifact the config toggles on is missing for this bug.
  bool available = true;
  std::string unavailable_reason;
  std::string seed_label;

  std::vector<MethodLocation> predicted_methods;
  /// Predictions whose bodies reached stages two and three, in prediction order.
  std::vector<MethodLocation> methods_used;
  int methods_dropped = 0;

  int line_samples = 0;
  int line_parse_failures = 0;
  std::vector<LineLocationSet> unique_line_sets;
  /// class_path -> workspace-relative file for every class named in unique_line_sets;
  /// "" when the class could not be resolved.
  std::map<std::string, std::string> class_files;

  std::vector<PatchAttempt> patches;
  int skipped_patch_samples = 0;

  std::vector<UsageRecord> usage;
  std::map<std::string, double> stage_timings;
  std::vector<StageError> errors;
  std::vector<ArchivedText> prompts;
  std::vector<ArchivedText> responses;

  bool plausible() const;
  /// Number of LLM samples drawn for `stage`, counted from the usage ledger.
  int samples_for(const std::string& stage) const;

  bool operator==(const TrialRecord&) const = default;
};

/// `trials/<bug>/<config>.json` relative to an output directory.
std::filesystem::path trial_record_path(const std::filesystem::path& out_dir, const std::string& bug_id,
                                        const ArtifactConfig& config);

/// Writes the record's texts beside it, then the JSON document last, so an existing
/// JSON file always denotes a complete record. Also writes each diff under
/// `patches/<bug>/<config>.rR.sS.diff`.
void write_trial_record(const std::filesystem::path& out_dir, const TrialRecord& record);

/// Reads a record and the texts it references. Raises MalformedRecord.
TrialRecord read_trial_record(const std::filesystem::path& json_path);

/// Every record under `<out_dir>/trials`, sorted by (bug, config label).
std::vector<TrialRecord> read_trial_records(const std::filesystem::path& out_dir);

}  // namespace devlore
