#pragma once

#include "devlore/llm_client.hpp"
#include "devlore/model.hpp"
#include "devlore/prompt.hpp"
#include "devlore/record.hpp"
#include "devlore/trace.hpp"
#include "devlore/validator.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace devlore {

struct PipelineOptions {
  int samples_method = 1;
  int samples_lines = 10;
  int samples_patch = 3;
  /// Stop drawing patch samples for a trial once one validates as plausible.
  bool stop_on_plausible = true;
  PromptOptions prompt;
  ValidatorOptions validator;
  trace::RecorderOptions recorder;
  /// Records every wall-clock measurement as zero so replayed runs are byte-identical.
  bool zero_timings = false;
  std::string seed_label;
  int jobs = 4;
};

/// Called after each (bug, config) pair of an ablation finishes; `resumed` means it was
/// loaded from disk rather than run.
using TrialCallback = std::function<void(const TrialRecord&, bool resumed)>;

class Pipeline {
 public:
  Pipeline(std::shared_ptr<LlmClient> client, PipelineOptions options);

  /// Stage one. Debug is never used here. Returns the parsed predictions in response
  /// order; an unparseable response is a recorded miss, not an error.
  std::vector<MethodLocation> run_method_localization(const BugCase& bug, const ArtifactConfig& config,
                                                      TrialRecord& record);

  /// Stage two over `methods`. Fills methods_used, the line samples and unique_line_sets.
  /// Marks the record unavailable when debug is toggled and the scope never executes.
  std::vector<LineLocationSet> run_line_localization(const BugCase& bug, const ArtifactConfig& config,
                                                     const std::vector<MethodLocation>& methods, TrialRecord& record);

  /// Stage three: `samples_patch` samples per unique line set (one empty-hint round when
  /// there is none), each applied to a private workspace copy and validated.
  void run_repair(const BugCase& bug, const ArtifactConfig& config, const std::vector<MethodLocation>& methods,
                  const std::vector<LineLocationSet>& line_sets, TrialRecord& record);

  /// All three stages. Always returns a record; stage failures are kept in `errors`.
  TrialRecord run_end_to_end(const BugCase& bug, const ArtifactConfig& config);

  /// corpus x configs with up to `jobs` trials at once. Each record is persisted under
  /// `out_dir` as soon as it completes; pairs already on disk are loaded, not rerun.
  /// Returned records are sorted by (bug, config label).
  std::vector<TrialRecord> run_ablation(const std::vector<BugCase>& corpus, const std::vector<ArtifactConfig>& configs,
                                        const std::filesystem::path& out_dir, const TrialCallback& on_trial = {});

  /// A record holding the identity fields and, when an artifact the config needs is
  /// missing, the unavailability reason.
  TrialRecord begin_record(const BugCase& bug, const ArtifactConfig& config);

  const PipelineOptions& options() const { return options_; }
  LlmClient& client() { return *client_; }

 private:
  struct BugArtifacts {
    std::once_flag once;
    std::optional<RelatedMethods> related;
    std::optional<std::string> issue;
    std::optional<std::string> error_stack;
    std::vector<StageError> errors;
    std::map<std::string, double> timings;
  };
  struct DebugEntry {
    std::once_flag once;
    std::optional<DebugTrace> trace;
    std::optional<StageError> error;
    double seconds = 0.0;
  };

  BugArtifacts& artifacts(const BugCase& bug);
  DebugEntry& debug_trace(const BugCase& bug, const std::vector<MethodLocation>& scope);
  ArtifactBundle bundle_for(const BugCase& bug, const ArtifactConfig& config);
  std::vector<MethodBody> load_bodies(const BugCase& bug, const RelatedMethods& related,
                                      const std::vector<MethodLocation>& methods, TrialRecord& record);
  double elapsed(double seconds) const { return options_.zero_timings ? 0.0 : seconds; }
  void keep_usage(const std::vector<Completion>& completions, TrialRecord& record) const;

  std::shared_ptr<LlmClient> client_;
  PipelineOptions options_;
  std::mutex cache_mu_;
  std::map<std::string, std::unique_ptr<BugArtifacts>> artifacts_;
  std::map<std::string, std::unique_ptr<DebugEntry>> debug_;
  /// Tracer runs for one bug never overlap.
  std::map<std::string, std::unique_ptr<std::mutex>> tracer_mu_;
};

}  // namespace devlore
