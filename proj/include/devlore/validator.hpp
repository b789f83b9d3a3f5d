#pragma once

#include "devlore/model.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

namespace devlore {

enum class Classification { FailedTrigger, Regression, Plausible };

std::string classification_name(Classification c);
Classification parse_classification(const std::string& name);

struct Verdict {
  bool failing_tests_passed = false;
  std::optional<bool> full_suite_passed;  // present iff the trigger stage passed
  Classification classification = Classification::FailedTrigger;
  double failing_run_seconds = 0.0;
  std::optional<double> full_run_seconds;
  std::string failing_run_output;
  std::optional<std::string> full_run_output;
  bool full_suite_retried = false;

  bool operator==(const Verdict&) const = default;
};

struct ValidatorOptions {
  std::chrono::milliseconds trigger_timeout{std::chrono::seconds(120)};
  std::chrono::milliseconds full_timeout{std::chrono::seconds(900)};
  /// One rerun of a failing full suite.
  bool retry_flaky = false;
};

/// Runs the originally failing tests against `workspace_copy`, then the full suite only if
/// they pass. Raises Timeout when a stage exceeds its cap and TestHarnessFailure when the
/// runner cannot start or is killed by a signal.
Verdict validate_patch(const BugCase& bug, const std::filesystem::path& workspace_copy,
                       const ValidatorOptions& options = {});

/// A review document placing the candidate diff beside the developer diff.
/// Raises MissingGroundTruth when the bug has no developer patch.
std::string side_by_side_report(const BugCase& bug, const std::string& candidate_diff);

}  // namespace devlore
