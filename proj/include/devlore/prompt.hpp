#pragma once

#include "devlore/model.hpp"
#include "devlore/trace.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace devlore {

struct PromptTriple {
  std::string general_task;
  std::string input;
  std::string expected_output;
  std::size_t estimated_tokens = 0;

  /// general_task + input + expected_output, the order the model sees them.
  std::string full_text() const;
  bool operator==(const PromptTriple&) const = default;
};

/// Source of one method with absolute line numbers.
struct MethodBody {
  MethodLocation location;
  std::string file;  // workspace-relative
  int first_line = 1;
  std::vector<std::string> lines;
  /// Set when the body end could not be found and a fixed window was used instead.
  bool approximate = false;

  bool operator==(const MethodBody&) const = default;
};

struct PromptOptions {
  std::size_t context_window_tokens = 128000;
  std::size_t response_reserve_tokens = 4096;
  trace::PruneLimits prune;
  std::size_t stack_line_cap = 50;

  std::size_t budget() const {
    return context_window_tokens > response_reserve_tokens ? context_window_tokens - response_reserve_tokens : 0;
  }
};

inline constexpr const char* kSkeletonHeader = "### Skeleton of Classes ###";
inline constexpr const char* kStackHeader = "### Error Stack ###";
inline constexpr const char* kIssueHeader = "### Issue Content ###";
inline constexpr const char* kDebugHeader = "### Debug Information ###";
inline constexpr const char* kLocationsHeader = "### Possible bug locations (for your reference only) ###";

/// Row 1: signatures of related methods; issue and stack when toggled. Debug is never
/// rendered at this stage. Over budget, trailing related methods are dropped first.
PromptTriple build_method_localization_prompt(const ArtifactBundle& bundle, const PromptOptions& options = {});

/// Row 2: numbered bodies of the localized methods plus toggled artifacts.
PromptTriple build_line_localization_prompt(const ArtifactBundle& bundle, const std::vector<MethodBody>& bodies,
                                            const PromptOptions& options = {});

/// Row 3: bodies, candidate line hints (possibly none) and toggled artifacts.
PromptTriple build_repair_prompt(const ArtifactBundle& bundle, const std::vector<MethodBody>& bodies,
                                 const LineLocationSet& candidate_lines, const PromptOptions& options = {});

/// Locates a method body from its declaration line: indentation-delimited for `.py`
/// files, brace-balanced otherwise. Falls back to a fixed window marked approximate.
MethodBody extract_method_body(const std::string& file_text, const RelatedMethod& method);

}  // namespace devlore
