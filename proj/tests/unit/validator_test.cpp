#include <doctest.h>

#include "devlore/error.hpp"
#include "devlore/patch.hpp"
#include "devlore/text.hpp"
#include "devlore/validator.hpp"
#include "test_support.hpp"

using namespace devlore;

TEST_CASE("developer patches validate as plausible") {
  for (const auto& bug : testing::corpus_bugs()) {
    CAPTURE(bug.id);
    WorkspaceCopy copy(bug.workspace_root);
    testing::apply_dev_patch(bug, copy.path());
    auto v = validate_patch(bug, copy.path());
    CHECK(v.failing_tests_passed);
    CHECK(v.full_suite_passed == true);
    CHECK(v.classification == Classification::Plausible);
    REQUIRE(v.full_run_seconds);
  }
}

TEST_CASE("identity patch fails the trigger stage and skips the full suite") {
  auto bug = testing::corpus_bug("calc-05");
  WorkspaceCopy copy(bug.workspace_root);
  auto v = validate_patch(bug, copy.path());
  CHECK_FALSE(v.failing_tests_passed);
  CHECK_FALSE(v.full_suite_passed);
  CHECK_FALSE(v.full_run_output);
  CHECK(v.classification == Classification::FailedTrigger);
  CHECK(v.failing_run_output.find("FAIL: tests.test_stats.StatsTest.test_variance") != std::string::npos);
}

TEST_CASE("a patch that fixes the trigger but breaks another test is a regression") {
  auto bug = testing::corpus_bug("calc-07");
  WorkspaceCopy copy(bug.workspace_root);
  EditScript s;
  s.blocks.push_back({"calc/intervals.py",
                      {"        return self.start < other.end and other.start < self.end"},
                      {"        return self.start <= other.end + 2 and other.start <= self.end + 2"}});
  copy.apply(s);
  auto v = validate_patch(bug, copy.path());
  CHECK(v.failing_tests_passed);
  CHECK(v.full_suite_passed == false);
  CHECK(v.classification == Classification::Regression);
  CHECK(v.full_run_output->find("test_overlaps_disjoint") != std::string::npos);

  SUBCASE("verdicts are reproducible") {
    auto again = validate_patch(bug, copy.path());
    CHECK(again.classification == v.classification);
    CHECK(again.failing_run_output == v.failing_run_output);
    CHECK(again.full_run_output == v.full_run_output);
  }
  SUBCASE("retry-flaky reruns once") {
    ValidatorOptions opts;
    opts.retry_flaky = true;
    auto again = validate_patch(bug, copy.path(), opts);
    CHECK(again.full_suite_retried);
    CHECK(again.classification == Classification::Regression);
  }
}

TEST_CASE("validator harness errors") {
  auto bug = testing::corpus_bug("calc-01");
  WorkspaceCopy copy(bug.workspace_root);
  SUBCASE("timeout") {
    bug.failing_test_command = "sleep 5";
    ValidatorOptions opts;
    opts.trigger_timeout = std::chrono::milliseconds(200);
    try {
      validate_patch(bug, copy.path(), opts);
      FAIL("expected Timeout");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Timeout);
    }
  }
  SUBCASE("runner missing") {
    bug.failing_test_command = "/no/runner {tests}";
    try {
      validate_patch(bug, copy.path());
      FAIL("expected TestHarnessFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TestHarnessFailure);
    }
  }
  SUBCASE("runner crash") {
    bug.failing_test_command = "kill -SEGV $$";
    try {
      validate_patch(bug, copy.path());
      FAIL("expected TestHarnessFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TestHarnessFailure);
    }
  }
}

TEST_CASE("side_by_side_report") {
  auto bug = testing::corpus_bug("calc-07");
  auto dev = text::read_file(bug.ground_truth->dev_patch_path);

  auto same = side_by_side_report(bug, dev);
  CHECK(same.find("textually identical") != std::string::npos);
  CHECK(same.find("candidate") != std::string::npos);

  auto other = side_by_side_report(bug, "--- a/calc/intervals.py\n+++ b/calc/intervals.py\n@@ -14 +14 @@\n-x\n+y\n");
  CHECK(other.find("textually identical") == std::string::npos);
  CHECK(other.find(" * ") != std::string::npos);

  bug.ground_truth.reset();
  try {
    side_by_side_report(bug, dev);
    FAIL("expected MissingGroundTruth");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingGroundTruth);
  }
}
