#include "devlore/pipeline.hpp"

#include "devlore/error.hpp"
#include "devlore/manifest.hpp"
#include "devlore/patch.hpp"
#include "devlore/response.hpp"
#include "devlore/text.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <thread>

namespace devlore {
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  if (from.empty()) return s;
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) s.replace(pos, from.size(), to);
  return s;
}

/// Private copies live under temp directories; records name them by role only.
std::string scrub(const std::string& s, const fs::path& workspace_copy) {
  return replace_all(s, workspace_copy.string(), "<workspace>");
}

std::string scope_key(const BugCase& bug, const std::vector<MethodLocation>& scope) {
  return bug.id + "\n" + trace::scope_argument(scope);
}

}  // namespace

Pipeline::Pipeline(std::shared_ptr<LlmClient> client, PipelineOptions options)
    : client_(std::move(client)), options_(std::move(options)) {}

Pipeline::BugArtifacts& Pipeline::artifacts(const BugCase& bug) {
  BugArtifacts* entry;
  std::mutex* tracer;
  {
    std::lock_guard lock(cache_mu_);
    auto& slot = artifacts_[bug.id];
    if (!slot) slot = std::make_unique<BugArtifacts>();
    entry = slot.get();
    auto& mu = tracer_mu_[bug.id];
    if (!mu) mu = std::make_unique<std::mutex>();
    tracer = mu.get();
  }
  std::call_once(entry->once, [&] {
    std::lock_guard tracer_lock(*tracer);
    entry->issue = read_issue(bug);
    {
      Stopwatch sw;
      try {
        entry->related = trace::record_related_methods(bug, options_.recorder);
      } catch (const Error& e) {
        entry->errors.push_back({kStageRelatedMethods, e.what()});
      }
      entry->timings[kStageRelatedMethods] = elapsed(sw.seconds());
    }
    {
      Stopwatch sw;
      try {
        entry->error_stack = trace::capture_error_stack(bug, options_.recorder);
      } catch (const Error& e) {
        entry->errors.push_back({kStageErrorStack, e.what()});
      }
      entry->timings[kStageErrorStack] = elapsed(sw.seconds());
    }
  });
  return *entry;
}

Pipeline::DebugEntry& Pipeline::debug_trace(const BugCase& bug, const std::vector<MethodLocation>& scope) {
  DebugEntry* entry;
  std::mutex* tracer;
  {
    std::lock_guard lock(cache_mu_);
    auto& slot = debug_[scope_key(bug, scope)];
    if (!slot) slot = std::make_unique<DebugEntry>();
    entry = slot.get();
    auto& mu = tracer_mu_[bug.id];
    if (!mu) mu = std::make_unique<std::mutex>();
    tracer = mu.get();
  }
  std::call_once(entry->once, [&] {
    std::lock_guard tracer_lock(*tracer);
    Stopwatch sw;
    try {
      entry->trace = trace::record_debug_trace(bug, scope, options_.recorder);
    } catch (const Error& e) {
      entry->error = StageError{kStageDebugTrace, e.what()};
    }
    entry->seconds = elapsed(sw.seconds());
  });
  return *entry;
}

ArtifactBundle Pipeline::bundle_for(const BugCase& bug, const ArtifactConfig& config) {
  auto& a = artifacts(bug);
  ArtifactBundle bundle;
  bundle.config = config;
  if (a.related) bundle.related_methods = *a.related;
  if (config.use_issue) bundle.issue = a.issue;
  if (config.use_stack) bundle.error_stack = a.error_stack;
  return bundle;
}

TrialRecord Pipeline::begin_record(const BugCase& bug, const ArtifactConfig& config) {
  TrialRecord record;
  record.bug_id = bug.id;
  record.config = config;
  record.seed_label = options_.seed_label;
  auto& a = artifacts(bug);
  record.errors = a.errors;
  record.stage_timings = a.timings;
  if (!a.related) {
    record.available = false;
    record.unavailable_reason = "related methods could not be recorded";
  } else if (config.use_issue && !a.issue) {
    record.available = false;
    record.unavailable_reason = "issue text absent";
  } else if (config.use_stack && !a.error_stack) {
    record.available = false;
    record.unavailable_reason = "error stack absent";
  }
  return record;
}

void Pipeline::keep_usage(const std::vector<Completion>& completions, TrialRecord& record) const {
  for (auto u : completions) {
    if (options_.zero_timings) u.usage.wall_time = 0.0;
    record.usage.push_back(u.usage);
  }
}

std::vector<MethodLocation> Pipeline::run_method_localization(const BugCase& bug, const ArtifactConfig& config,
                                                              TrialRecord& record) {
  auto stage_config = config;
  stage_config.use_debug = false;
  auto bundle = bundle_for(bug, stage_config);
  Stopwatch sw;
  std::vector<MethodLocation> predicted;
  try {
    auto prompt = build_method_localization_prompt(bundle, options_.prompt);
    record.prompts.push_back({"method.prompt.txt", prompt.full_text()});
    auto completions = client_->complete(prompt, options_.samples_method, kStageMethodLocalization);
    keep_usage(completions, record);
    for (std::size_t i = 0; i < completions.size(); ++i) {
      record.responses.push_back({"method.response." + std::to_string(i) + ".txt", completions[i].text});
      try {
        for (auto& m : parse_method_locations(completions[i].text)) {
          if (std::find(predicted.begin(), predicted.end(), m) == predicted.end()) predicted.push_back(m);
        }
      } catch (const Error& e) {
        record.errors.push_back({kStageMethodLocalization, e.what()});
      }
    }
  } catch (const Error& e) {
    record.errors.push_back({kStageMethodLocalization, e.what()});
  }
  record.predicted_methods = predicted;
  record.stage_timings[kStageMethodLocalization] = elapsed(sw.seconds());
  return predicted;
}

std::vector<MethodBody> Pipeline::load_bodies(const BugCase& bug, const RelatedMethods& related,
                                              const std::vector<MethodLocation>& methods, TrialRecord& record) {
  std::vector<MethodBody> bodies;
  std::map<std::string, std::string> files;
  for (const auto& m : methods) {
    const auto* rm = related.find(m);
    if (!rm) {
      ++record.methods_dropped;
      record.errors.push_back({kStageLineLocalization, "no recorded method matches " + m.to_string()});
      continue;
    }
    auto it = files.find(rm->file);
    if (it == files.end()) {
      try {
        it = files.emplace(rm->file, text::read_file(bug.workspace_root / rm->file)).first;
      } catch (const Error&) {
        ++record.methods_dropped;
        record.errors.push_back({kStageLineLocalization, "cannot read " + rm->file + " for " + m.to_string()});
        continue;
      }
    }
    auto body = extract_method_body(it->second, *rm);
    body.location = m;
    bodies.push_back(std::move(body));
  }
  return bodies;
}

std::vector<LineLocationSet> Pipeline::run_line_localization(const BugCase& bug, const ArtifactConfig& config,
                                                             const std::vector<MethodLocation>& methods,
                                                             TrialRecord& record) {
  if (methods.empty()) throw Error(ErrorCode::PreconditionViolated, "line localization needs at least one method");
  auto bundle = bundle_for(bug, config);
  auto bodies = load_bodies(bug, bundle.related_methods, methods, record);
  if (bodies.empty()) return {};

  auto used = [&] {
    std::vector<MethodLocation> out;
    for (const auto& b : bodies) out.push_back(b.location);
    return out;
  };
  if (config.use_debug) {
    auto& entry = debug_trace(bug, used());
    record.stage_timings[kStageDebugTrace] = entry.seconds;
    if (!entry.trace) {
      record.available = false;
      record.unavailable_reason = "debug trace unavailable";
      if (entry.error) record.errors.push_back(*entry.error);
      record.methods_used = used();
      return {};
    }
    bundle.debug = entry.trace;
  }

  Stopwatch sw;
  std::optional<PromptTriple> prompt;
  // Later predictions give way first when the bodies do not fit.
  while (!bodies.empty()) {
    try {
      prompt = build_line_localization_prompt(bundle, bodies, options_.prompt);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TokenBudgetExceeded) throw;
      bodies.pop_back();
      ++record.methods_dropped;
    }
  }
  record.methods_used = used();
  if (!prompt) {
    record.errors.push_back({kStageLineLocalization, "no method body fits the token budget"});
    record.stage_timings[kStageLineLocalization] = elapsed(sw.seconds());
    return {};
  }

  std::vector<LineLocationSet> parsed;
  record.prompts.push_back({"lines.prompt.txt", prompt->full_text()});
  try {
    auto completions = client_->complete(*prompt, options_.samples_lines, kStageLineLocalization);
    keep_usage(completions, record);
    record.line_samples = static_cast<int>(completions.size());
    for (std::size_t i = 0; i < completions.size(); ++i) {
      record.responses.push_back({"lines.response." + std::to_string(i) + ".txt", completions[i].text});
      try {
        parsed.push_back(parse_line_locations(completions[i].text));
      } catch (const Error&) {
        ++record.line_parse_failures;
      }
    }
  } catch (const Error& e) {
    record.errors.push_back({kStageLineLocalization, e.what()});
  }
  record.unique_line_sets = dedup_location_sets(parsed);
  for (const auto& set : record.unique_line_sets) {
    for (const auto& [cls, lines] : set.entries) {
      if (record.class_files.count(cls)) continue;
      try {
        record.class_files[cls] = resolve_class_file(cls, bundle.related_methods, bug.workspace_root);
      } catch (const Error&) {
        record.class_files[cls] = "";
      }
    }
  }
  record.stage_timings[kStageLineLocalization] = elapsed(sw.seconds());
  return record.unique_line_sets;
}

void Pipeline::run_repair(const BugCase& bug, const ArtifactConfig& config, const std::vector<MethodLocation>& methods,
                          const std::vector<LineLocationSet>& line_sets, TrialRecord& record) {
  if (methods.empty()) throw Error(ErrorCode::PreconditionViolated, "repair needs at least one method");
  auto bundle = bundle_for(bug, config);
  TrialRecord scratch;  // body-loading notes were already taken by stage two
  auto bodies = load_bodies(bug, bundle.related_methods, methods, scratch);
  if (record.methods_used.empty()) {
    for (const auto& b : bodies) record.methods_used.push_back(b.location);
    record.methods_dropped += scratch.methods_dropped;
    record.errors.insert(record.errors.end(), scratch.errors.begin(), scratch.errors.end());
  }
  if (bodies.empty()) {
    record.errors.push_back({kStagePatchGeneration, "no method bodies to repair"});
    return;
  }
  if (config.use_debug) {
    auto& entry = debug_trace(bug, record.methods_used);
    if (entry.trace) bundle.debug = entry.trace;
  }

  std::vector<LineLocationSet> rounds = line_sets;
  if (rounds.empty()) rounds.emplace_back();
  double generation = 0.0, validation = 0.0;
  bool done = false;
  std::optional<WorkspaceCopy> copy;

  for (std::size_t r = 0; r < rounds.size(); ++r) {
    if (done) {
      record.skipped_patch_samples += options_.samples_patch;
      continue;
    }
    std::optional<PromptTriple> prompt;
    {
      Stopwatch sw;
      try {
        prompt = build_repair_prompt(bundle, bodies, rounds[r], options_.prompt);
      } catch (const Error& e) {
        record.errors.push_back({kStagePatchGeneration, "round " + std::to_string(r) + ": " + e.what()});
      }
      generation += sw.seconds();
    }
    if (!prompt) continue;
    auto round_prefix = "repair." + std::to_string(r);
    record.prompts.push_back({round_prefix + ".prompt.txt", prompt->full_text()});

    // Stop-on-plausible needs each sample judged before the next is drawn.
    std::vector<Completion> batch;
    std::optional<std::string> batch_error;
    if (!options_.stop_on_plausible) {
      Stopwatch sw;
      try {
        batch = client_->complete(*prompt, options_.samples_patch, kStagePatchGeneration);
        keep_usage(batch, record);
      } catch (const Error& e) {
        batch_error = e.what();
      }
      generation += sw.seconds();
    }

    for (int s = 0; s < options_.samples_patch; ++s) {
      if (done) {
        ++record.skipped_patch_samples;
        continue;
      }
      PatchAttempt attempt;
      attempt.round = static_cast<int>(r);
      attempt.sample = s;
      std::string response;
      if (options_.stop_on_plausible) {
        Stopwatch sw;
        try {
          auto one = client_->complete(*prompt, 1, kStagePatchGeneration, s);
          keep_usage(one, record);
          response = one.front().text;
        } catch (const Error& e) {
          attempt.error = e.what();
        }
        generation += sw.seconds();
      } else if (batch_error) {
        attempt.error = *batch_error;
      } else {
        response = batch[static_cast<std::size_t>(s)].text;
      }
      if (attempt.error) {
        record.patches.push_back(std::move(attempt));
        continue;
      }
      attempt.response_name = round_prefix + ".response." + std::to_string(s) + ".txt";
      record.responses.push_back({attempt.response_name, response});

      try {
        attempt.script = parse_edit_script(response, attempt.response_name);
      } catch (const Error& e) {
        attempt.error = e.what();
        record.patches.push_back(std::move(attempt));
        continue;
      }

      Stopwatch sw;
      try {
        if (!copy) copy.emplace(bug.workspace_root);
        attempt.patch = copy->apply(*attempt.script);
        try {
          auto verdict = validate_patch(bug, copy->path(), options_.validator);
          verdict.failing_run_output = scrub(verdict.failing_run_output, copy->path());
          if (verdict.full_run_output) verdict.full_run_output = scrub(*verdict.full_run_output, copy->path());
          if (options_.zero_timings) {
            verdict.failing_run_seconds = 0.0;
            if (verdict.full_run_seconds) verdict.full_run_seconds = 0.0;
          }
          attempt.verdict = verdict;
        } catch (const Error& e) {
          attempt.error = scrub(e.what(), copy->path());
        }
        copy->revert();
      } catch (const Error& e) {
        attempt.error = copy ? scrub(e.what(), copy->path()) : std::string(e.what());
        if (e.code() == ErrorCode::RevertFailed) copy.reset();
      }
      validation += sw.seconds();
      if (attempt.plausible() && options_.stop_on_plausible) done = true;
      record.patches.push_back(std::move(attempt));
    }
  }
  record.stage_timings[kStagePatchGeneration] = elapsed(generation);
  record.stage_timings[kStagePatchValidation] = elapsed(validation);
}

TrialRecord Pipeline::run_end_to_end(const BugCase& bug, const ArtifactConfig& config) {
  auto record = begin_record(bug, config);
  if (!record.available) return record;
  auto methods = run_method_localization(bug, config, record);
  if (methods.empty()) return record;
  auto line_sets = run_line_localization(bug, config, methods, record);
  if (!record.available || record.methods_used.empty()) return record;
  run_repair(bug, config, record.methods_used, line_sets, record);
  return record;
}

std::vector<TrialRecord> Pipeline::run_ablation(const std::vector<BugCase>& corpus,
                                                const std::vector<ArtifactConfig>& configs, const fs::path& out_dir,
                                                const TrialCallback& on_trial) {
  if (configs.empty()) throw Error(ErrorCode::PreconditionViolated, "ablation needs at least one config");
  std::vector<std::pair<const BugCase*, ArtifactConfig>> pairs;
  for (const auto& bug : corpus) {
    for (const auto& c : configs) pairs.emplace_back(&bug, c);
  }
  std::vector<std::optional<TrialRecord>> results(pairs.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mu;
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (auto i = next++; i < pairs.size(); i = next++) {
      const auto& [bug, config] = pairs[i];
      try {
        auto path = trial_record_path(out_dir, bug->id, config);
        bool resumed = false;
        std::error_code ec;
        if (fs::is_regular_file(path, ec)) {
          try {
            results[i] = read_trial_record(path);
            resumed = true;
          } catch (const Error&) {
            // A damaged record is rerun rather than trusted.
          }
        }
        if (!resumed) {
          results[i] = run_end_to_end(*bug, config);
          write_trial_record(out_dir, *results[i]);
        }
        if (on_trial) {
          std::lock_guard lock(callback_mu);
          on_trial(*results[i], resumed);
        }
      } catch (const Error& e) {
        // Kept in memory only, so the next run retries the pair.
        TrialRecord failed;
        failed.bug_id = bug->id;
        failed.config = config;
        failed.seed_label = options_.seed_label;
        failed.errors.push_back({"trial", e.what()});
        results[i] = std::move(failed);
        if (on_trial) {
          std::lock_guard lock(callback_mu);
          on_trial(*results[i], false);
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  auto jobs = static_cast<std::size_t>(std::max(1, options_.jobs));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < std::min(jobs, pairs.size()); ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<TrialRecord> out;
  for (auto& r : results) out.push_back(std::move(*r));
  std::sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::pair(a.bug_id, a.config.label()) < std::pair(b.bug_id, b.config.label());
  });
  return out;
}

}  // namespace devlore
