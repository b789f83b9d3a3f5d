#include <doctest.h>

#include "devlore/error.hpp"
#include "devlore/manifest.hpp"
#include "devlore/text.hpp"
#include "devlore/trace.hpp"
#include "test_support.hpp"

#include <nlohmann/json.hpp>

#include <random>

using namespace devlore;
using namespace devlore::trace;
using nlohmann::ordered_json;

namespace {

// Independent crop oracle over compact JSON: rebuilds the expected text from a parsed tree.
std::string crop_oracle(const ordered_json& j, std::size_t limit) {
  if (!j.is_structured()) return j.dump();
  std::string out = j.is_array() ? "[" : "{";
  std::size_t i = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++i) {
    if (i == limit) {
      out += std::string(limit ? "," : "") + "...(+" + std::to_string(j.size() - limit) + " more)";
      break;
    }
    if (i) out += ",";
    if (j.is_object()) out += ordered_json(it.key()).dump() + ":";
    out += crop_oracle(*it, limit);
  }
  return out + (j.is_array() ? "]" : "}");
}

ordered_json random_json(std::mt19937& rng, int depth) {
  switch (depth > 0 ? rng() % 6 : rng() % 3) {
    case 0: return static_cast<int>(rng() % 1000);
    case 1: return std::string(rng() % 5, static_cast<char>('a' + rng() % 26));
    case 2: return nullptr;
    case 3:
    case 4: {
      auto a = ordered_json::array();
      for (unsigned n = rng() % 25; n > 0; --n) a.push_back(random_json(rng, depth - 1));
      return a;
    }
    default: {
      auto o = ordered_json::object();
      for (unsigned n = rng() % 15; n > 0; --n) o["k" + std::to_string(rng() % 40)] = random_json(rng, depth - 1);
      return o;
    }
  }
}

StepEvent step(std::string cls, std::string member, int line, std::vector<std::pair<std::string, std::string>> vars) {
  return {std::move(cls), std::move(member), line, std::move(vars)};
}

}  // namespace

TEST_CASE("trace wire format round trips every event kind") {
  std::vector<TraceEvent> events{
      MethodEnter{{"calc.number_utils.NumberUtils", "create_number", "(s)", "calc/number_utils.py", 4}},
      LineStep{step("calc.number_utils.NumberUtils", "create_number", 18, {{"hexDigits", "8"}, {"s", "\"0x8\""}})},
      LineStep{step("a.B", "m", 3, {})},
      TestResult{"tests.T.test_x", "fail", "AssertionError: 1 != 2"},
  };
  std::string jsonl;
  for (const auto& e : events) jsonl += serialize_event(e) + "\n";
  CHECK(parse_trace(jsonl) == events);
  CHECK(serialize_event(events[1]) ==
        R"({"e":"s","class":"calc.number_utils.NumberUtils","method":"create_number","line":18,"vars":{"hexDigits":8,"s":"0x8"}})");
}

TEST_CASE("parse_trace keeps variable order and drops a truncated tail") {
  auto events = parse_trace(
      "{\"e\":\"s\",\"class\":\"A\",\"method\":\"f\",\"line\":2,\"vars\":{\"z\":1,\"a\":[1, 2]}}\n"
      "{\"e\":\"s\",\"class\":\"A\",\"method\":\"f\",\"line\":3,\"vars\":{\"q\"");
  REQUIRE(events.size() == 1);
  const auto& s = std::get<LineStep>(events[0]).step;
  CHECK(s.changed_vars == std::vector<std::pair<std::string, std::string>>{{"z", "1"}, {"a", "[1,2]"}});
}

TEST_CASE("parse_trace rejects malformed interior lines") {
  auto expect_failure = [](const std::string& jsonl) {
    try {
      parse_trace(jsonl);
      FAIL("expected TracerFailed for " << jsonl);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TracerFailed);
    }
  };
  expect_failure("not json\n{\"e\":\"t\",\"test\":\"x\",\"status\":\"pass\",\"message\":\"\"}\n");
  expect_failure("{\"e\":\"q\"}\n");
  expect_failure("{\"e\":\"m\",\"class\":\"A\",\"method\":\"f\",\"sig\":\"()\",\"file\":\"a.py\",\"line\":0}\n");
  expect_failure("{\"e\":\"t\",\"test\":\"x\",\"status\":\"skipped\",\"message\":\"\"}\n");
  expect_failure("{\"e\":\"s\",\"class\":\"A\",\"method\":\"f\",\"line\":1}\n");
  expect_failure("{\"broken\"\n");
}

TEST_CASE("related methods are unique in first-entry order") {
  std::vector<TraceEvent> events{
      MethodEnter{{"p.B", "g", "(x)", "p/b.py", 9}},
      MethodEnter{{"p.A", "f", "()", "p/a.py", 1}},
      MethodEnter{{"p.B", "g", "(x)", "p/b.py", 9}},
      MethodEnter{{"p.B", "g", "(x, y)", "p/b.py", 20}},
      TestResult{"t", "fail", ""},
  };
  auto related = related_methods_from_events(events);
  REQUIRE(related.methods.size() == 3);
  CHECK(related.methods[0].location() == MethodLocation{"p.B", "g"});
  CHECK(related.methods[1].location() == MethodLocation{"p.A", "f"});
  CHECK(related.methods[2].signature == "(x, y)");
  auto groups = related.grouped_by_class();
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == "p.B");
  CHECK(groups[0].second == std::vector<std::size_t>{0, 2});
}

TEST_CASE("debug trace reports only changed variables per frame") {
  std::vector<MethodLocation> scope{{"A", "f"}};
  std::vector<TraceEvent> events{
      MethodEnter{{"A", "f", "(x)", "a.py", 1}},
      LineStep{step("A", "f", 2, {{"x", "1"}})},
      LineStep{step("A", "f", 3, {{"x", "1"}, {"y", "2"}})},
      LineStep{step("Other", "g", 7, {{"x", "9"}})},
      LineStep{step("A", "f", 4, {{"x", "5"}, {"y", "2"}})},
      MethodEnter{{"A", "f", "(x)", "a.py", 1}},
      LineStep{step("A", "f", 2, {{"x", "5"}})},
  };
  auto trace = debug_trace_from_events(events, scope);
  REQUIRE(trace.events.size() == 4);
  CHECK(trace.events[0].changed_vars == std::vector<std::pair<std::string, std::string>>{{"x", "1"}});
  CHECK(trace.events[1].changed_vars == std::vector<std::pair<std::string, std::string>>{{"y", "2"}});
  CHECK(trace.events[2].changed_vars == std::vector<std::pair<std::string, std::string>>{{"x", "5"}});
  // a new frame reports its arguments afresh
  CHECK(trace.events[3].changed_vars == std::vector<std::pair<std::string, std::string>>{{"x", "5"}});
}

TEST_CASE("changed-vars property over random full-snapshot traces") {
  std::mt19937 rng(11);
  for (int round = 0; round < 50; ++round) {
    std::vector<TraceEvent> events{MethodEnter{{"A", "f", "()", "a.py", 1}}};
    std::vector<std::map<std::string, std::string>> snapshots;
    std::map<std::string, std::string> state;
    for (int i = 0; i < 40; ++i) {
      state["v" + std::to_string(rng() % 4)] = std::to_string(rng() % 3);
      snapshots.push_back(state);
      std::vector<std::pair<std::string, std::string>> vars(state.begin(), state.end());
      events.push_back(LineStep{step("A", "f", i + 2, vars)});
    }
    auto trace = debug_trace_from_events(events, {{"A", "f"}});
    REQUIRE(trace.events.size() == snapshots.size());
    std::map<std::string, std::string> replayed;
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
      for (const auto& [name, value] : trace.events[i].changed_vars) {
        CHECK(replayed[name] != value);  // reported only on change
        replayed[name] = value;
      }
      CHECK(replayed == snapshots[i]);  // nothing missed
    }
  }
}

TEST_CASE("scope_argument") {
  CHECK(scope_argument({}) == "*");
  CHECK(scope_argument({{"a.B", "f"}, {"c.D", "g"}}) == "a.B::f,c.D::g");
}

TEST_CASE("crop_json_value on a long list") {
  std::string hundred = "[";
  for (int i = 0; i < 100; ++i) hundred += (i ? "," : "") + std::to_string(i);
  hundred += "]";
  CHECK(crop_json_value(hundred, 10) == "[0,1,2,3,4,5,6,7,8,9,...(+90 more)]");
  CHECK(crop_json_value("[1, 2, 3]", 10) == "[1, 2, 3]");
  CHECK(crop_json_value("[1, 2, 3]", 2) == "[1, 2, ...(+1 more)]");
  CHECK(crop_json_value(R"({"a":[1,2,3],"b":{"c":1,"d":2}})", 1) == R"({"a":[1,...(+2 more)],...(+1 more)})");
  CHECK(crop_json_value("<Interval: Interval(1, 3)>", 1) == "<Interval: Interval(1, 3)>");
  CHECK(crop_json_value(R"("[1,2,3]")", 1) == R"("[1,2,3]")");
}

TEST_CASE("crop_json_value agrees with a tree oracle") {
  std::mt19937 rng(3);
  for (int round = 0; round < 300; ++round) {
    auto j = random_json(rng, 3);
    std::size_t limit = rng() % 12;
    CHECK(crop_json_value(j.dump(), limit) == crop_oracle(j, limit));
  }
}

TEST_CASE("cap_value_chars keeps a UTF-8 safe prefix") {
  CHECK(cap_value_chars("abcdef", 6) == "abcdef");
  CHECK(cap_value_chars("abcdefg", 6) == "abc...");
  CHECK(cap_value_chars("\"\xC3\xA9\xC3\xA9\xC3\xA9\"", 6) == "\"\xC3\xA9...");
}

TEST_CASE("prune keeps the most recent events and is idempotent") {
  DebugTrace trace;
  for (int i = 0; i < 5000; ++i) trace.events.push_back(step("A", "f", i + 1, {{"i", std::to_string(i)}}));
  auto pruned = prune_debug_trace(trace, {});
  REQUIRE(pruned.events.size() == 1000);
  CHECK(pruned.events.front().line == 4001);
  CHECK(pruned.events.back().line == 5000);

  SUBCASE("small traces pass through unchanged") {
    DebugTrace small;
    small.events.push_back(step("A", "f", 1, {{"x", "[1,2]"}}));
    CHECK(prune_debug_trace(small, {}) == small);
  }
  SUBCASE("token budget drops from the front") {
    PruneLimits limits;
    limits.token_budget = 100;
    auto tight = prune_debug_trace(trace, limits);
    CHECK(text::estimate_tokens(render_debug_lines(tight)) <= 100);
    CHECK(tight.events.back().line == 5000);
    DebugTrace one_more = tight;
    one_more.events.insert(one_more.events.begin(), trace.events[trace.events.size() - tight.events.size() - 1]);
    CHECK(text::estimate_tokens(render_debug_lines(one_more)) > 100);
  }
}

TEST_CASE("prune idempotence property") {
  std::mt19937 rng(5);
  for (int round = 0; round < 60; ++round) {
    DebugTrace trace;
    int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::string, std::string>> vars;
      for (unsigned v = rng() % 3; v > 0; --v) {
        auto value = rng() % 4 == 0 ? std::string("<Obj: thing ") + std::string(rng() % 300, 'x') + ">"
                                    : random_json(rng, 3).dump();
        vars.emplace_back("v" + std::to_string(v), value);
      }
      trace.events.push_back(step("A", "f", i + 1, vars));
    }
    PruneLimits limits{1 + rng() % 12, 5 + rng() % 200, 1 + rng() % 50, 20 + rng() % 400};
    auto once = prune_debug_trace(trace, limits);
    CHECK(prune_debug_trace(once, limits) == once);
    CHECK(once.events.size() <= limits.max_events);
    for (const auto& ev : once.events) {
      for (const auto& [name, value] : ev.changed_vars) CHECK(value.size() <= limits.max_value_chars);
    }
  }
}

TEST_CASE("render_debug_line format") {
  auto ev = step("calc.number_utils.NumberUtils", "create_number", 18, {{"hexDigits", "8"}});
  CHECK(render_debug_line(ev) == "calc.number_utils.NumberUtils:create_number:18 {hexDigits:8}");
  CHECK(render_debug_line(step("a.B", "g", 3, {})) == "a.B:g:3 {}");
  CHECK(render_debug_line(step("a.B", "g", 3, {{"x", "1"}, {"s", "\"t\""}})) == "a.B:g:3 {x:1, s:\"t\"}");
}

TEST_CASE("extract_error_stack finds the failure section") {
  CHECK_FALSE(extract_error_stack(""));
  CHECK(extract_error_stack("noise\nTraceback (most recent call last):\n  File \"x.py\"\nValueError: bad\n") ==
        "Traceback (most recent call last):\n  File \"x.py\"\nValueError: bad");
  CHECK(extract_error_stack("setup\nFAIL: test_a (T)\n--------\nAssertionError\n\n----------------------------------------------------------------------\nRan 3 tests in 0.1s\n") ==
        "FAIL: test_a (T)\n--------\nAssertionError");
  CHECK(extract_error_stack("java.lang.NullPointerException: x\n\tat a.B.f(B.java:3)\n") ==
        "java.lang.NullPointerException: x\n\tat a.B.f(B.java:3)");
  CHECK(extract_error_stack("plain output only\n") == "plain output only");
}

TEST_CASE("recorders against the sample corpus") {
  auto bug = testing::corpus_bug("calc-01");

  auto related = record_related_methods(bug);
  REQUIRE(related.methods.size() == 1);
  CHECK(related.methods[0].location() == MethodLocation{"calc.number_utils.NumberUtils", "create_number"});
  CHECK(related.methods[0].file == "calc/number_utils.py");

  auto trace = record_debug_trace(bug, {{"calc.number_utils.NumberUtils", "create_number"}});
  auto rendered = render_debug_lines(trace);
  CHECK(rendered.find("calc.number_utils.NumberUtils:create_number:18 {hexDigits:8}") != std::string::npos);

  try {
    record_debug_trace(bug, {{"calc.stats", "mean"}});
    FAIL("expected EmptyTrace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTrace);
  }
  CHECK_THROWS_AS(record_debug_trace(bug, {}), Error);

  auto stack = capture_error_stack(bug);
  REQUIRE(stack);
  CHECK(stack->rfind("FAIL: tests.test_numbers.NumberUtilsTest.test_hex_long", 0) == 0);

  SUBCASE("a tracer that crashes without output") {
    bug.tracer_command = "exit 3";
    try {
      record_related_methods(bug);
      FAIL("expected TracerFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TracerFailed);
    }
  }
  SUBCASE("a test command that cannot start") {
    bug.failing_test_command = "/no/such/runner {tests}";
    try {
      capture_error_stack(bug);
      FAIL("expected TestRunFailedToStart");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TestRunFailedToStart);
    }
  }
}
