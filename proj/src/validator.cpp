#include "devlore/validator.hpp"

#include "devlore/error.hpp"
#include "devlore/process.hpp"
#include "devlore/text.hpp"

#include <algorithm>

namespace devlore {
namespace {

ProcessResult run_stage(const std::string& what, const std::string& tmpl, const BugCase& bug,
                        const std::filesystem::path& workspace, bool with_tests, std::chrono::milliseconds timeout) {
  CommandVars vars{workspace.string(), with_tests ? bug.failing_tests : std::vector<std::string>{}, "", ""};
  auto cmd = substitute_command(tmpl, vars);
  auto r = run_shell(cmd, {bug.base_dir, timeout, {}});
  if (r.timed_out) {
    throw Error(ErrorCode::Timeout, what + " exceeded " + std::to_string(timeout.count() / 1000) + " s for " + bug.id);
  }
  if (r.failed_to_start()) {
    throw Error(ErrorCode::TestHarnessFailure, what + " did not start (exit " + std::to_string(r.exit_code) + ")");
  }
  if (r.signal) {
    throw Error(ErrorCode::TestHarnessFailure, what + " killed by signal " + std::to_string(*r.signal));
  }
  return r;
}

// Lines that carry the change itself, without file headers.
std::vector<std::string> change_body(const std::string& diff_text) {
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(diff_text)) {
    if (text::starts_with(line, "--- ") || text::starts_with(line, "+++ ") || text::starts_with(line, "diff ") ||
        text::starts_with(line, "index ")) {
      continue;
    }
    out.push_back(std::string(text::rtrim(line)));
  }
  return out;
}

std::string cell(std::string s, std::size_t width) {
  for (auto& c : s) {
    if (c == '\t') c = ' ';
  }
  if (s.size() > width) return s.substr(0, width - 1) + "~";
  return s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string classification_name(Classification c) {
  switch (c) {
    case Classification::FailedTrigger: return "failed_trigger";
    case Classification::Regression: return "regression";
    case Classification::Plausible: return "plausible";
  }
  return "failed_trigger";
}

Classification parse_classification(const std::string& name) {
  if (name == "plausible") return Classification::Plausible;
  if (name == "regression") return Classification::Regression;
  if (name == "failed_trigger") return Classification::FailedTrigger;
  throw Error(ErrorCode::MalformedRecord, "unknown classification '" + name + "'");
}

Verdict validate_patch(const BugCase& bug, const std::filesystem::path& workspace_copy, const ValidatorOptions& options) {
  Verdict v;
  auto trigger = run_stage("failing-test run", bug.failing_test_command, bug, workspace_copy, true, options.trigger_timeout);
  v.failing_run_seconds = trigger.seconds;
  v.failing_run_output = trigger.combined_output();
  v.failing_tests_passed = trigger.exit_code == 0;
  if (!v.failing_tests_passed) return v;

  auto full = run_stage("full-suite run", bug.full_test_command, bug, workspace_copy, false, options.full_timeout);
  if (full.exit_code != 0 && options.retry_flaky) {
    v.full_suite_retried = true;
    full = run_stage("full-suite rerun", bug.full_test_command, bug, workspace_copy, false, options.full_timeout);
  }
  v.full_run_seconds = full.seconds;
  v.full_run_output = full.combined_output();
  v.full_suite_passed = full.exit_code == 0;
  v.classification = *v.full_suite_passed ? Classification::Plausible : Classification::Regression;
  return v;
}

std::string side_by_side_report(const BugCase& bug, const std::string& candidate_diff) {
  if (!bug.ground_truth) throw Error(ErrorCode::MissingGroundTruth, "no developer patch for " + bug.id);
  std::string dev_diff;
  try {
    dev_diff = text::read_file(bug.ground_truth->dev_patch_path);
  } catch (const Error&) {
    throw Error(ErrorCode::MissingGroundTruth, "developer patch unreadable for " + bug.id);
  }

  auto left = change_body(candidate_diff);
  auto right = change_body(dev_diff);
  bool identical = left == right;

  constexpr std::size_t kWidth = 60;
  std::string out = "# Patch review: " + bug.id + "\n\n";
  out += identical ? "Verdict hint: textually identical\n\n" : "Verdict hint: differs from developer patch\n\n";
  out += "```\n" + cell("candidate", kWidth) + " | developer\n" + std::string(kWidth, '-') + "-+-" +
         std::string(kWidth, '-') + "\n";
  for (std::size_t i = 0; i < std::max(left.size(), right.size()); ++i) {
    auto l = i < left.size() ? left[i] : "";
    auto r = i < right.size() ? right[i] : "";
    char mark = l == r ? '|' : '*';
    out += cell(l, kWidth) + ' ' + mark + ' ' + std::string(text::rtrim(cell(r, kWidth))) + "\n";
  }
  out += "```\n\n## Candidate diff\n\n```diff\n" + candidate_diff + (text::ends_with(candidate_diff, "\n") ? "" : "\n") +
         "```\n\n## Developer diff\n\n```diff\n" + dev_diff + (text::ends_with(dev_diff, "\n") ? "" : "\n") + "```\n";
  return out;
}

}  // namespace devlore
