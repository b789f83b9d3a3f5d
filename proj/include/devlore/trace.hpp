#pragma once

#include "devlore/model.hpp"

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace devlore::trace {

// ---- wire format -----------------------------------------------------------

struct MethodEnter {
  RelatedMethod method;
  bool operator==(const MethodEnter&) const = default;
};

struct LineStep {
  StepEvent step;
  bool operator==(const LineStep&) const = default;
};

struct TestResult {
  std::string test;
  std::string status;  // pass | fail | error
  std::string message;
  bool operator==(const TestResult&) const = default;
};

using TraceEvent = std::variant<MethodEnter, LineStep, TestResult>;

/// Parses a JSONL trace. A final line without a terminating newline that fails to
/// parse is treated as a crash-truncated tail and dropped; any other malformed line
/// raises TracerFailed.
std::vector<TraceEvent> parse_trace(std::string_view jsonl);

std::string serialize_event(const TraceEvent& event);

// ---- host-side reduction of raw events ---------------------------------------

/// Unique (class, member, signature) in first-entry order.
RelatedMethods related_methods_from_events(const std::vector<TraceEvent>& events);

/// Keeps the step events whose (class, member) is in scope and re-applies the
/// changed-vars rule per call frame. A method-enter event for a scoped member opens
/// a new frame for that member; without one, all steps of a member share a frame.
DebugTrace debug_trace_from_events(const std::vector<TraceEvent>& events, const std::vector<MethodLocation>& scope);

/// Renders `{scope}` for the tracer command: `*`, or comma-separated `class::member`.
std::string scope_argument(const std::vector<MethodLocation>& scope);

// ---- recorders (tracer adapter as a subprocess) ------------------------------

struct RecorderOptions {
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
};

RelatedMethods record_related_methods(const BugCase& bug, const RecorderOptions& options = {});

DebugTrace record_debug_trace(const BugCase& bug, const std::vector<MethodLocation>& scope,
                              const RecorderOptions& options = {});

/// Runs the failing tests and extracts the failure section of their output, or
/// nullopt when the run prints nothing that looks like a failure.
std::optional<std::string> capture_error_stack(const BugCase& bug, const RecorderOptions& options = {});

/// The pure extraction step of capture_error_stack.
std::optional<std::string> extract_error_stack(const std::string& output);

// ---- pruning and rendering ---------------------------------------------------

struct PruneLimits {
  std::size_t crop_limit = 10;
  std::size_t max_value_chars = 200;
  std::size_t max_events = 1000;
  std::size_t token_budget = 60000;
};

/// Crops every JSON array/object in `value` (at any depth) to `crop_limit` elements,
/// appending `...(+K more)` where elements were dropped. Retained elements keep their
/// original bytes. Text that is not valid JSON is returned unchanged.
std::string crop_json_value(std::string_view value, std::size_t crop_limit);

/// Caps a value at `max_chars` bytes; truncated values end in `...`.
std::string cap_value_chars(std::string_view value, std::size_t max_chars);

DebugTrace prune_debug_trace(const DebugTrace& trace, const PruneLimits& limits);

std::string render_debug_line(const StepEvent& event);
/// One line per event: `<class_path>:<member>:<line> {<name>:<value>, ...}`.
std::string render_debug_lines(const DebugTrace& trace);

}  // namespace devlore::trace
