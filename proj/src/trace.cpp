#include "devlore/trace.hpp"

#include "devlore/error.hpp"
#include "devlore/process.hpp"
#include "devlore/temp_dir.hpp"
#include "devlore/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <tuple>

namespace devlore::trace {
namespace {

using ojson = nlohmann::ordered_json;

std::string field_string(const ojson& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::TracerFailed,
                "trace line " + std::to_string(line_no) + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

int field_line(const ojson& j, std::size_t line_no) {
  auto it = j.find("line");
  if (it == j.end() || !it->is_number_integer() || it->get<long long>() <= 0) {
    throw Error(ErrorCode::TracerFailed, "trace line " + std::to_string(line_no) + ": 'line' must be a positive integer");
  }
  return it->get<int>();
}

TraceEvent decode_event(const ojson& j, std::size_t line_no) {
  if (!j.is_object()) throw Error(ErrorCode::TracerFailed, "trace line " + std::to_string(line_no) + " is not an object");
  auto kind = field_string(j, "e", line_no);
  if (kind == "m") {
    RelatedMethod m;
    m.class_path = field_string(j, "class", line_no);
    m.member = field_string(j, "method", line_no);
    m.signature = field_string(j, "sig", line_no);
    m.file = field_string(j, "file", line_no);
    m.declaration_line = field_line(j, line_no);
    return MethodEnter{std::move(m)};
  }
  if (kind == "s") {
    StepEvent s;
    s.class_path = field_string(j, "class", line_no);
    s.member = field_string(j, "method", line_no);
    s.line = field_line(j, line_no);
    auto vars = j.find("vars");
    if (vars == j.end() || !vars->is_object()) {
      throw Error(ErrorCode::TracerFailed, "trace line " + std::to_string(line_no) + ": 'vars' must be an object");
    }
    for (const auto& [name, value] : vars->items()) s.changed_vars.emplace_back(name, value.dump(-1, ' ', false, ojson::error_handler_t::replace));
    return LineStep{std::move(s)};
  }
  if (kind == "t") {
    TestResult t;
    t.test = field_string(j, "test", line_no);
    t.status = field_string(j, "status", line_no);
    if (t.status != "pass" && t.status != "fail" && t.status != "error") {
      throw Error(ErrorCode::TracerFailed, "trace line " + std::to_string(line_no) + ": bad test status '" + t.status + "'");
    }
    t.message = field_string(j, "message", line_no);
    return t;
  }
  throw Error(ErrorCode::TracerFailed, "trace line " + std::to_string(line_no) + ": unknown event kind '" + kind + "'");
}

bool in_scope(const std::vector<MethodLocation>& scope, const std::string& cls, const std::string& member) {
  return std::any_of(scope.begin(), scope.end(),
                     [&](const MethodLocation& m) { return m.class_path == cls && m.member == member; });
}

std::vector<TraceEvent> run_tracer(const BugCase& bug, const std::string& scope, const RecorderOptions& options) {
  TempDir dir("devlore-trace");
  auto out_path = dir.path() / "trace.jsonl";
  CommandVars vars{bug.workspace_root.string(), bug.failing_tests, out_path.string(), scope};
  auto cmd = substitute_command(bug.tracer_command, vars);
  auto result = run_shell(cmd, {bug.base_dir, options.timeout, {}});

  std::error_code ec;
  bool have_file = std::filesystem::is_regular_file(out_path, ec) && std::filesystem::file_size(out_path, ec) > 0;
  if (!have_file) {
    if (result.timed_out) throw Error(ErrorCode::TracerFailed, "tracer timed out with no trace: " + cmd);
    if (!result.ok()) {
      throw Error(ErrorCode::TracerFailed, "tracer exited " + std::to_string(result.exit_code) +
                                               " with no trace: " + std::string(text::trim(result.stderr_text)));
    }
    return {};
  }
  // A crashed tracer still leaves a usable prefix; keep whatever parsed.
  return parse_trace(text::read_file(out_path));
}

// Minimal JSON walker for cropping. Input is known-valid JSON.
class Cropper {
 public:
  Cropper(std::string_view src, std::size_t limit) : src_(src), limit_(limit) {}

  std::string run() {
    std::size_t pos = 0;
    return value(pos);
  }

 private:
  void skip_ws(std::size_t& pos) const {
    while (pos < src_.size() && (src_[pos] == ' ' || src_[pos] == '\t' || src_[pos] == '\n' || src_[pos] == '\r')) ++pos;
  }

  std::size_t string_end(std::size_t pos) const {
    ++pos;  // opening quote
    while (pos < src_.size() && src_[pos] != '"') pos += (src_[pos] == '\\') ? 2 : 1;
    return pos + 1;
  }

  std::string value(std::size_t& pos) {
    skip_ws(pos);
    std::size_t start = pos;
    char c = src_[pos];
    if (c == '"') {
      pos = string_end(pos);
      return std::string(src_.substr(start, pos - start));
    }
    if (c == '[' || c == '{') return container(pos);
    while (pos < src_.size() && src_[pos] != ',' && src_[pos] != ']' && src_[pos] != '}' && src_[pos] != ' ' &&
           src_[pos] != '\n' && src_[pos] != '\t' && src_[pos] != '\r') {
      ++pos;
    }
    return std::string(src_.substr(start, pos - start));
  }

  std::string container(std::size_t& pos) {
    std::size_t start = pos;
    char open = src_[pos];
    char close = open == '[' ? ']' : '}';
    ++pos;
    std::vector<std::string> kept;
    std::size_t dropped = 0;
    bool changed = false;
    std::string separator = ",";
    bool first = true;
    for (;;) {
      skip_ws(pos);
      if (src_[pos] == close) {
        ++pos;
        break;
      }
      std::size_t elem_start = pos;
      std::string elem;
      if (open == '{') {
        std::size_t key_end = string_end(pos);
        std::size_t colon = key_end;
        skip_ws(colon);
        ++colon;  // ':'
        std::size_t after = colon;
        std::string inner = value(after);
        elem = std::string(src_.substr(elem_start, colon - elem_start));
        std::size_t ws_end = colon;
        skip_ws(ws_end);
        elem += std::string(src_.substr(colon, ws_end - colon)) + inner;
        pos = after;
      } else {
        elem = value(pos);
      }
      if (elem != src_.substr(elem_start, pos - elem_start)) changed = true;
      if (kept.size() < limit_) {
        kept.push_back(std::move(elem));
      } else {
        ++dropped;
      }
      std::size_t sep_start = pos;
      skip_ws(pos);
      if (src_[pos] == ',') {
        ++pos;
        std::size_t after_comma = pos;
        skip_ws(after_comma);
        if (first) separator = std::string(src_.substr(sep_start, after_comma - sep_start));
        first = false;
      }
    }
    if (!changed && dropped == 0) return std::string(src_.substr(start, pos - start));
    if (separator.find_first_of(" \n\t") != std::string::npos) separator = ", ";
    std::string out(1, open);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i) out += separator;
      out += kept[i];
    }
    if (dropped > 0) {
      if (!kept.empty()) out += separator;
      out += "...(+" + std::to_string(dropped) + " more)";
    }
    out += close;
    return out;
  }

  std::string_view src_;
  std::size_t limit_;
};

}  // namespace

std::vector<TraceEvent> parse_trace(std::string_view jsonl) {
  std::vector<TraceEvent> events;
  auto lines = text::split_lines(jsonl);
  bool terminated = !jsonl.empty() && jsonl.back() == '\n';
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const ojson::exception& e) {
      if (i + 1 == lines.size() && !terminated) break;  // truncated tail
      throw Error(ErrorCode::TracerFailed, "trace line " + std::to_string(i + 1) + " is not JSON: " + e.what());
    }
    events.push_back(decode_event(j, i + 1));
  }
  return events;
}

std::string serialize_event(const TraceEvent& event) {
  ojson j;
  if (const auto* m = std::get_if<MethodEnter>(&event)) {
    j = {{"e", "m"},
         {"class", m->method.class_path},
         {"method", m->method.member},
         {"sig", m->method.signature},
         {"file", m->method.file},
         {"line", m->method.declaration_line}};
  } else if (const auto* s = std::get_if<LineStep>(&event)) {
    ojson vars = ojson::object();
    for (const auto& [name, value] : s->step.changed_vars) {
      vars[name] = ojson::accept(value) ? ojson::parse(value) : ojson(value);
    }
    j = {{"e", "s"}, {"class", s->step.class_path}, {"method", s->step.member}, {"line", s->step.line}, {"vars", vars}};
  } else {
    const auto& t = std::get<TestResult>(event);
    j = {{"e", "t"}, {"test", t.test}, {"status", t.status}, {"message", t.message}};
  }
  return j.dump();
}

RelatedMethods related_methods_from_events(const std::vector<TraceEvent>& events) {
  RelatedMethods out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& ev : events) {
    const auto* m = std::get_if<MethodEnter>(&ev);
    if (!m) continue;
    if (seen.emplace(m->method.class_path, m->method.member, m->method.signature).second) {
      out.methods.push_back(m->method);
    }
  }
  return out;
}

DebugTrace debug_trace_from_events(const std::vector<TraceEvent>& events, const std::vector<MethodLocation>& scope) {
  DebugTrace out;
  out.scope = scope;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> frames;
  for (const auto& ev : events) {
    if (const auto* m = std::get_if<MethodEnter>(&ev)) {
      if (in_scope(scope, m->method.class_path, m->method.member)) {
        frames[{m->method.class_path, m->method.member}].clear();
      }
      continue;
    }
    const auto* s = std::get_if<LineStep>(&ev);
    if (!s || !in_scope(scope, s->step.class_path, s->step.member)) continue;
    auto& last = frames[{s->step.class_path, s->step.member}];
    StepEvent step = s->step;
    step.changed_vars.clear();
    for (const auto& [name, value] : s->step.changed_vars) {
      auto it = last.find(name);
      if (it != last.end() && it->second == value) continue;
      last[name] = value;
      step.changed_vars.emplace_back(name, value);
    }
    out.events.push_back(std::move(step));
  }
  return out;
}

std::string scope_argument(const std::vector<MethodLocation>& scope) {
  if (scope.empty()) return "*";
  std::vector<std::string> parts;
  for (const auto& m : scope) parts.push_back(m.to_string());
  return text::join(parts, ",");
}

RelatedMethods record_related_methods(const BugCase& bug, const RecorderOptions& options) {
  auto events = run_tracer(bug, "*", options);
  auto related = related_methods_from_events(events);
  if (related.empty()) {
    throw Error(ErrorCode::EmptyTrace, "no method-enter events for " + bug.id + " (check scope and failing tests)");
  }
  return related;
}

DebugTrace record_debug_trace(const BugCase& bug, const std::vector<MethodLocation>& scope,
                              const RecorderOptions& options) {
  if (scope.empty()) throw Error(ErrorCode::PreconditionViolated, "debug trace scope is empty");
  auto events = run_tracer(bug, scope_argument(scope), options);
  auto trace = debug_trace_from_events(events, scope);
  if (trace.events.empty()) {
    throw Error(ErrorCode::EmptyTrace, "scoped methods never executed for " + bug.id + ": " + scope_argument(scope));
  }
  return trace;
}

std::optional<std::string> extract_error_stack(const std::string& output) {
  if (text::trim(output).empty()) return std::nullopt;
  static const std::regex kMarker(
      R"(^(Traceback \(most recent call last\)|FAIL:|ERROR:|FAILED\b|Exception in thread|\S*(Error|Exception)\b|\s+at\s+\S+\())");
  static const std::regex kSummary(R"(\n-{20,}\r?\nRan \d+ tests?\b)");
  auto lines = text::split_lines(output);
  std::size_t offset = 0;
  std::optional<std::size_t> start;
  for (const auto& line : lines) {
    if (std::regex_search(line, kMarker)) {
      start = offset;
      break;
    }
    offset += line.size() + 1;
  }
  if (!start) return std::string(text::rtrim(output));
  std::string section = output.substr(*start);
  std::smatch m;
  if (std::regex_search(section, m, kSummary)) section = section.substr(0, static_cast<std::size_t>(m.position(0)));
  return std::string(text::rtrim(section));
}

std::optional<std::string> capture_error_stack(const BugCase& bug, const RecorderOptions& options) {
  CommandVars vars{bug.workspace_root.string(), bug.failing_tests, "", ""};
  auto cmd = substitute_command(bug.failing_test_command, vars);
  auto result = run_shell(cmd, {bug.base_dir, options.timeout, {}});
  if (result.failed_to_start()) {
    throw Error(ErrorCode::TestRunFailedToStart,
                "failing-test command did not start (exit " + std::to_string(result.exit_code) + "): " + cmd);
  }
  if (result.ok()) return std::nullopt;
  return extract_error_stack(result.combined_output());
}

std::string crop_json_value(std::string_view value, std::size_t crop_limit) {
  if (!ojson::accept(value)) return std::string(value);
  return Cropper(value, crop_limit).run();
}

std::string cap_value_chars(std::string_view value, std::size_t max_chars) {
  if (value.size() <= max_chars) return std::string(value);
  static constexpr std::string_view kEllipsis = "...";
  if (max_chars <= kEllipsis.size()) return std::string(text::utf8_prefix(value, max_chars));
  return std::string(text::utf8_prefix(value, max_chars - kEllipsis.size())) + std::string(kEllipsis);
}

std::string render_debug_line(const StepEvent& event) {
  std::string out = event.class_path + ":" + event.member + ":" + std::to_string(event.line) + " {";
  for (std::size_t i = 0; i < event.changed_vars.size(); ++i) {
    if (i) out += ", ";
    out += event.changed_vars[i].first;
    out += ':';
    out += event.changed_vars[i].second;
  }
  out += '}';
  return out;
}

std::string render_debug_lines(const DebugTrace& trace) {
  std::string out;
  for (const auto& ev : trace.events) {
    out += render_debug_line(ev);
    out += '\n';
  }
  return out;
}

DebugTrace prune_debug_trace(const DebugTrace& trace, const PruneLimits& limits) {
  DebugTrace out;
  out.scope = trace.scope;
  std::size_t first = trace.events.size() > limits.max_events ? trace.events.size() - limits.max_events : 0;
  for (std::size_t i = first; i < trace.events.size(); ++i) {
    StepEvent ev = trace.events[i];
    for (auto& [name, value] : ev.changed_vars) {
      value = cap_value_chars(crop_json_value(value, limits.crop_limit), limits.max_value_chars);
    }
    out.events.push_back(std::move(ev));
  }

  // Drop from the front until the rendering fits the token budget.
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& ev : out.events) {
    widths.push_back(render_debug_line(ev).size() + 1);
    total += widths.back();
  }
  std::size_t drop = 0;
  // same rounding as text::estimate_tokens over the joined rendering
  while (drop < widths.size() && (total + 3) / 4 > limits.token_budget) {
    total -= widths[drop++];
  }
  out.events.erase(out.events.begin(), out.events.begin() + static_cast<std::ptrdiff_t>(drop));
  return out;
}

}  // namespace devlore::trace
