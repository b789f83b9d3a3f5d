#include "devlore/prompt.hpp"

#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <algorithm>
#include <optional>
#include <regex>

namespace devlore {
namespace {

constexpr const char* kGeneralLocalize =
    "You are a Software Engineer. Review the following skeleton of classes, test case(s), and exception that occurs "
    "when doing the test.\n"
    "Provide a set of locations that need to be edited to fix the bug. ";
constexpr const char* kMethodsOnly = "The locations must be specified as method names or field names.";
constexpr const char* kLinesOnly = "The locations must be specified as line number in class.";
constexpr const char* kGeneralRepair =
    "You are a Software Engineer. Review the following methods and(or) fields of classes, test case(s), and exception "
    "that occurs when doing the test. Try to fix the bug.";

constexpr const char* kExpectedMethods =
    "Please localize class name and method names or field names that need to be edited.\n"
    "Examples:\n"
    "path.to.ClassA::methodA\n"
    "path.to.ClassA::methodB\n"
    "path.to.ClassB::methodA\n";
constexpr const char* kExpectedLines =
    "Please localize class name and line number that need to be edited.\n"
    "Examples:\n"
    "path.to.ClassA\n"
    "  line: 20\n"
    "  line: 45\n"
    "  line: 46\n"
    "  line: 47\n";
constexpr const char* kExpectedRepair =
    "Please generate *SEARCH/REPLACE* edits to fix the bug based on the info given above. Every *SEARCH/REPLACE* "
    "edit must use this format:\n"
    "  1. The file path\n"
    "  2. The start of search block: <<<<<<< SEARCH\n"
    "  3. A contiguous chunk of lines to search in the existing source code\n"
    "  4. The dividing line: =======\n"
    "  5. The lines to replace into the source code\n"
    "  6. The end of the replace block: >>>>>>> REPLACE\n";

constexpr const char* kNoLineHints = "No line hints are available; consider the whole of each method above.\n";

const std::regex kDiscussionRule(R"(^-{4,}\s*$)");

std::string section(const char* header, const std::string& body) {
  std::string out = std::string(header) + "\n" + body;
  if (!text::ends_with(out, "\n")) out += '\n';
  return out + "\n";
}

std::string render_skeleton(const RelatedMethods& related, std::size_t keep) {
  std::string out;
  for (const auto& [cls, indices] : related.grouped_by_class()) {
    std::string block;
    for (auto i : indices) {
      if (i >= keep) continue;
      const auto& m = related.methods[i];
      block += m.member + m.signature + "\n";
    }
    if (!block.empty()) out += "### " + cls + " ###\n" + block;
  }
  return out;
}

std::string render_bodies(const std::vector<MethodBody>& bodies) {
  std::string out;
  std::optional<std::string> current_class;
  for (const auto& b : bodies) {
    if (current_class != b.location.class_path) {
      out += "### " + b.location.class_path + " ###\n";
      current_class = b.location.class_path;
    }
    out += "File: " + b.file + "\n";
    int last = b.first_line + static_cast<int>(b.lines.size()) - 1;
    auto width = std::max<std::size_t>(3, std::to_string(last).size());
    for (std::size_t i = 0; i < b.lines.size(); ++i) {
      auto n = std::to_string(b.first_line + static_cast<int>(i));
      out += std::string(width - n.size(), ' ') + n + ": " + b.lines[i] + "\n";
    }
    out += "\n";
  }
  return out;
}

std::string issue_description(const std::string& issue) {
  auto lines = text::split_lines(issue);
  std::vector<std::string> kept;
  for (const auto& l : lines) {
    if (std::regex_match(l, kDiscussionRule)) break;
    kept.push_back(l);
  }
  return text::join(kept, "\n") + "\n";
}

std::string first_lines(const std::string& s, std::size_t n) {
  auto lines = text::split_lines(s);
  if (lines.size() <= n) return s;
  lines.resize(n);
  return text::join(lines, "\n") + "\n";
}

// Mutable artifact texts so the over-budget policy can shrink them step by step.
struct Artifacts {
  std::optional<std::string> stack;
  std::optional<std::string> issue;
  std::optional<trace::PruneLimits> debug_limits;
  const DebugTrace* debug = nullptr;

  std::string render() const {
    std::string out;
    if (stack) out += section(kStackHeader, *stack);
    if (issue) out += section(kIssueHeader, *issue);
    if (debug && debug_limits) out += section(kDebugHeader, trace::render_debug_lines(trace::prune_debug_trace(*debug, *debug_limits)));
    return out;
  }
};

Artifacts collect(const ArtifactBundle& bundle, const PromptOptions& options, bool allow_debug) {
  Artifacts a;
  if (bundle.config.use_stack && bundle.error_stack) a.stack = *bundle.error_stack;
  if (bundle.config.use_issue && bundle.issue) a.issue = *bundle.issue;
  if (allow_debug && bundle.config.use_debug && bundle.debug) {
    a.debug = &*bundle.debug;
    a.debug_limits = options.prune;
  }
  return a;
}

PromptTriple assemble(std::string general, std::string input, std::string expected) {
  PromptTriple p{std::move(general), std::move(input), std::move(expected), 0};
  p.estimated_tokens = text::estimate_tokens(p.full_text());
  return p;
}

// Shrinks artifacts in the fixed order debug -> issue discussion -> stack until the
// prompt built by `make` fits. Returns nullopt when nothing is left to shrink.
template <typename Make>
std::optional<PromptTriple> fit(Artifacts& a, const PromptOptions& options, Make make) {
  auto p = make(a);
  if (p.estimated_tokens <= options.budget()) return p;

  while (a.debug && a.debug_limits && a.debug_limits->token_budget > 0) {
    auto shown = trace::prune_debug_trace(*a.debug, *a.debug_limits);
    if (shown.events.empty()) break;
    a.debug_limits->token_budget /= 2;
    p = make(a);
    if (p.estimated_tokens <= options.budget()) return p;
  }
  if (a.issue) {
    a.issue = issue_description(*a.issue);
    p = make(a);
    if (p.estimated_tokens <= options.budget()) return p;
  }
  if (a.stack) {
    a.stack = first_lines(*a.stack, options.stack_line_cap);
    p = make(a);
    if (p.estimated_tokens <= options.budget()) return p;
  }
  return std::nullopt;
}

[[noreturn]] void over_budget(const std::string& what, const PromptOptions& options) {
  throw Error(ErrorCode::TokenBudgetExceeded,
              what + " prompt exceeds " + std::to_string(options.budget()) + " tokens after truncation");
}

}  // namespace

std::string PromptTriple::full_text() const { return general_task + input + expected_output; }

PromptTriple build_method_localization_prompt(const ArtifactBundle& bundle, const PromptOptions& options) {
  if (bundle.related_methods.empty()) throw Error(ErrorCode::PreconditionViolated, "no related methods to render");
  std::string general = std::string(kGeneralLocalize) + kMethodsOnly + "\n\n";
  for (std::size_t keep = bundle.related_methods.methods.size(); keep >= 1; --keep) {
    auto a = collect(bundle, options, false);
    auto fitted = fit(a, options, [&](const Artifacts& art) {
      return assemble(general, section(kSkeletonHeader, render_skeleton(bundle.related_methods, keep)) + art.render(),
                      kExpectedMethods);
    });
    if (fitted) return *fitted;
  }
  over_budget("method-localization", options);
}

PromptTriple build_line_localization_prompt(const ArtifactBundle& bundle, const std::vector<MethodBody>& bodies,
                                            const PromptOptions& options) {
  if (bodies.empty()) throw Error(ErrorCode::PreconditionViolated, "no method bodies for line localization");
  std::string general = std::string(kGeneralLocalize) + kLinesOnly + "\n\n";
  auto skeleton = section(kSkeletonHeader, render_bodies(bodies));
  auto a = collect(bundle, options, true);
  auto fitted = fit(a, options, [&](const Artifacts& art) { return assemble(general, skeleton + art.render(), kExpectedLines); });
  if (!fitted) over_budget("line-localization", options);
  return *fitted;
}

PromptTriple build_repair_prompt(const ArtifactBundle& bundle, const std::vector<MethodBody>& bodies,
                                 const LineLocationSet& candidate_lines, const PromptOptions& options) {
  if (bodies.empty()) throw Error(ErrorCode::PreconditionViolated, "no method bodies for repair");
  std::string general = std::string(kGeneralRepair) + "\n\n";
  auto head = section(kSkeletonHeader, render_bodies(bodies)) +
              section(kLocationsHeader, candidate_lines.empty() ? std::string(kNoLineHints) : candidate_lines.to_string());
  auto a = collect(bundle, options, true);
  auto fitted = fit(a, options, [&](const Artifacts& art) { return assemble(general, head + art.render(), kExpectedRepair); });
  if (!fitted) over_budget("repair", options);
  return *fitted;
}

MethodBody extract_method_body(const std::string& file_text, const RelatedMethod& method) {
  constexpr int kWindow = 40;
  auto lines = text::split_lines(file_text);
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  MethodBody body;
  body.location = method.location();
  body.file = method.file;
  auto n = static_cast<int>(lines.size());
  int decl = std::clamp(method.declaration_line, 1, std::max(n, 1)) - 1;
  if (n == 0) {
    body.approximate = true;
    return body;
  }

  auto indent_of = [](const std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return i;
  };
  auto blank = [](const std::string& s) { return text::trim(s).empty(); };

  std::optional<int> end;
  int start = decl;
  if (text::ends_with(method.file, ".py")) {
    // The recorded line may point at a decorator; the body is indented past the `def`.
    int def = decl;
    while (def < n && !std::regex_search(lines[def], std::regex(R"(^\s*(async\s+)?def\s)"))) ++def;
    if (def < n) {
      auto base = indent_of(lines[def]);
      int i = def + 1;
      // A multi-line signature ends at the first line closing with ':'.
      int header_end = def;
      while (header_end < std::min(n, def + 10) && !text::ends_with(text::rtrim(lines[header_end]), ":")) ++header_end;
      if (header_end < n && header_end < def + 10) i = header_end + 1;
      int last = i - 1;
      for (; i < n; ++i) {
        if (blank(lines[i])) continue;
        if (indent_of(lines[i]) <= base) break;
        last = i;
      }
      end = last;
    }
  } else {
    int depth = 0;
    bool opened = false;
    for (int i = decl; i < n && !end; ++i) {
      bool in_string = false;
      char quote = 0;
      for (std::size_t k = 0; k < lines[i].size(); ++k) {
        char c = lines[i][k];
        if (in_string) {
          if (c == '\\') ++k;
          else if (c == quote) in_string = false;
          continue;
        }
        if (c == '"' || c == '\'') {
          in_string = true;
          quote = c;
        } else if (c == '/' && k + 1 < lines[i].size() && lines[i][k + 1] == '/') {
          break;
        } else if (c == '{') {
          ++depth;
          opened = true;
        } else if (c == '}') {
          --depth;
          if (opened && depth == 0) {
            end = i;
            break;
          }
        } else if (c == ';' && !opened) {
          end = i;  // abstract or interface declaration
          break;
        }
      }
    }
  }
  if (!end) {
    body.approximate = true;
    end = std::min(n - 1, decl + kWindow - 1);
  }
  body.first_line = start + 1;
  body.lines.assign(lines.begin() + start, lines.begin() + *end + 1);
  while (!body.lines.empty() && blank(body.lines.back())) body.lines.pop_back();
  return body;
}

}  // namespace devlore
