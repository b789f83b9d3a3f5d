#include "cli.hpp"

#include "devlore/error.hpp"
#include "devlore/manifest.hpp"
#include "devlore/metrics.hpp"
#include "devlore/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <set>

namespace devlore::cli {
namespace fs = std::filesystem;

namespace {

const char* kAllConfigs = "none;issue;stack;debug;issue+stack;issue+debug;stack+debug;issue+stack+debug";

struct Options {
  std::string manifest;
  std::string out;
  std::vector<std::string> bugs;
  std::string artifacts = "none";
  std::string configs = kAllConfigs;
  std::string methods;
  bool no_line_hints = false;
  std::string mock;
  std::string record;
  std::string model = "gpt-4o-mini";
  std::string api_base = "https://api.openai.com/v1";
  std::string api_key_env = "DEVLORE_API_KEY";
  double temperature = 0.5;
  double top_p = 1.0;
  int samples_lines = 10;
  int samples_patch = 3;
  int jobs = 4;
  bool stop_on_plausible = true;
  bool retry_flaky = false;
  bool batch_samples = false;
  std::string seed_label;
  std::size_t context_window = 128000;
  int max_retries = 3;
  int requests_per_minute = 0;
  std::string price_input = "0.00015";
  std::string price_output = "0.0006";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_corpus_options(CLI::App& cmd, Options& o, bool needs_out) {
  cmd.add_option("--manifest", o.manifest, "Bug corpus manifest (JSON)")->required();
  auto* out = cmd.add_option("--out", o.out, "Output directory for trial records");
  if (needs_out) out->required();
  cmd.add_option("--bug", o.bugs, "Restrict to these bug ids (repeatable)");
}

void add_run_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--mock", o.mock, "Replay fixtures from this directory; no network access");
  cmd.add_option("--record", o.record, "Store every live answer as a replay fixture here");
  cmd.add_option("--model", o.model, "Model name")->capture_default_str();
  cmd.add_option("--api-base", o.api_base, "OpenAI-compatible endpoint base URL")->capture_default_str();
  cmd.add_option("--api-key-env", o.api_key_env, "Environment variable holding the API key")->capture_default_str();
  cmd.add_option("--temperature", o.temperature)->capture_default_str();
  cmd.add_option("--top-p", o.top_p)->capture_default_str();
  cmd.add_option("--samples-lines", o.samples_lines, "Line-localization samples")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--samples-patch", o.samples_patch, "Patch samples per unique line set")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--jobs", o.jobs, "Concurrent (bug, config) trials")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_flag("--stop-on-plausible,!--no-stop-on-plausible", o.stop_on_plausible,
               "Stop sampling patches once one is plausible (default on)");
  cmd.add_flag("--retry-flaky", o.retry_flaky, "Rerun a failing full suite once");
  cmd.add_flag("--batch-samples", o.batch_samples, "Request n completions in one call");
  cmd.add_option("--seed-label", o.seed_label, "Free-form label stored in every record");
  cmd.add_option("--context-window", o.context_window)->capture_default_str();
  cmd.add_option("--max-retries", o.max_retries)->capture_default_str();
  cmd.add_option("--requests-per-minute", o.requests_per_minute, "0 means unlimited")->capture_default_str();
  cmd.add_option("--price-input", o.price_input, "Dollars per 1000 input tokens")->capture_default_str();
  cmd.add_option("--price-output", o.price_output, "Dollars per 1000 output tokens")->capture_default_str();
}

std::vector<BugCase> select_bugs(const Options& o) {
  auto all = load_manifest(o.manifest);
  if (o.bugs.empty()) return all;
  std::vector<BugCase> out;
  for (const auto& id : o.bugs) {
    auto it = std::find_if(all.begin(), all.end(), [&](const BugCase& b) { return b.id == id; });
    if (it == all.end()) throw UsageError("unknown bug id: " + id);
    out.push_back(*it);
  }
  return out;
}

std::shared_ptr<LlmClient> make_client(const Options& o) {
  ModelConfig mc;
  mc.model_name = o.model;
  mc.temperature = o.temperature;
  mc.top_p = o.top_p;
  mc.context_window_tokens = o.context_window;
  mc.max_retries = o.max_retries;
  mc.api_base = o.api_base;
  mc.api_key_env = o.api_key_env;
  mc.batch_samples = o.batch_samples;
  mc.max_concurrent_requests = std::max(1, o.jobs);
  mc.requests_per_minute = o.requests_per_minute;
  mc.price_per_1k_input = Money::parse(o.price_input);
  mc.price_per_1k_output = Money::parse(o.price_output);

  std::shared_ptr<ChatBackend> backend;
  if (!o.mock.empty()) {
    if (!fs::is_directory(o.mock)) throw UsageError("--mock directory does not exist: " + o.mock);
    backend = std::make_shared<ReplayBackend>(o.mock);
  } else {
    const char* key = std::getenv(o.api_key_env.c_str());
    if (!key || !*key) {
      throw Error(ErrorCode::AuthFailure, "environment variable " + o.api_key_env + " is not set (or pass --mock)");
    }
    backend = std::make_shared<HttpBackend>(o.api_base, key);
    if (!o.record.empty()) {
      fs::create_directories(o.record);
      backend = std::make_shared<RecordingBackend>(backend, o.record);
    }
  }
  return std::make_shared<LlmClient>(mc, backend);
}

PipelineOptions pipeline_options(const Options& o) {
  PipelineOptions p;
  p.samples_lines = o.samples_lines;
  p.samples_patch = o.samples_patch;
  p.stop_on_plausible = o.stop_on_plausible;
  p.validator.retry_flaky = o.retry_flaky;
  p.prompt.context_window_tokens = o.context_window;
  p.zero_timings = !o.mock.empty();
  p.seed_label = o.seed_label;
  p.jobs = o.jobs;
  return p;
}

std::string outcome(const TrialRecord& r) {
  if (!r.available) return "unavailable (" + r.unavailable_reason + ")";
  if (r.plausible()) return "plausible";
  if (!r.patches.empty()) return "unfixed";
  if (!r.unique_line_sets.empty()) return "lines localized";
  if (!r.predicted_methods.empty()) return "methods localized";
  return "no prediction";
}

void report_trial(std::ostream& out, std::ostream& err, const TrialRecord& r, bool resumed) {
  out << r.bug_id << " " << r.config.label() << ": " << outcome(r) << (resumed ? " [resumed]" : "") << "\n";
  for (const auto& e : r.errors) err << "  " << r.bug_id << " " << r.config.label() << " " << e.stage << ": " << e.message << "\n";
}

std::vector<MethodLocation> methods_for(const Options& o, const BugCase& bug) {
  if (o.methods.empty()) return {};
  if (o.methods == "truth") {
    if (!bug.ground_truth) throw Error(ErrorCode::MissingGroundTruth, bug.id + " has no ground truth methods");
    return bug.ground_truth->buggy_methods;
  }
  std::vector<MethodLocation> out;
  std::string item;
  std::istringstream in(o.methods);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(MethodLocation::parse(item));
  }
  return out;
}

enum class StageCommand { Methods, Lines, Repair };

void run_stage_command(StageCommand which, const Options& o, std::ostream& out, std::ostream& err) {
  auto config = ArtifactConfig::parse(o.artifacts);
  auto bugs = select_bugs(o);
  Pipeline pipeline(make_client(o), pipeline_options(o));
  for (const auto& bug : bugs) {
    auto path = trial_record_path(o.out, bug.id, config);
    if (fs::is_regular_file(path)) {
      report_trial(out, err, read_trial_record(path), true);
      continue;
    }
    auto record = pipeline.begin_record(bug, config);
    if (record.available) {
      auto methods = methods_for(o, bug);
      if (methods.empty()) methods = pipeline.run_method_localization(bug, config, record);
      if (which != StageCommand::Methods && !methods.empty()) {
        std::vector<LineLocationSet> sets;
        if (which == StageCommand::Lines || !o.no_line_hints) sets = pipeline.run_line_localization(bug, config, methods, record);
        if (which == StageCommand::Repair && record.available) {
          auto used = record.methods_used.empty() ? methods : record.methods_used;
          pipeline.run_repair(bug, config, used, sets, record);
        }
      }
    }
    write_trial_record(o.out, record);
    report_trial(out, err, record, false);
    if (which == StageCommand::Methods) {
      for (const auto& m : record.predicted_methods) out << "  " << m.to_string() << "\n";
    } else if (which == StageCommand::Lines) {
      for (const auto& s : record.unique_line_sets) out << "  " << s.to_string() << "\n";
    }
  }
}

void run_matrix(const Options& o, const std::vector<ArtifactConfig>& configs, std::ostream& out, std::ostream& err) {
  auto bugs = select_bugs(o);
  Pipeline pipeline(make_client(o), pipeline_options(o));
  auto records = pipeline.run_ablation(bugs, configs, o.out, [&](const TrialRecord& r, bool resumed) {
    report_trial(out, err, r, resumed);
  });
  int plausible = 0;
  for (const auto& r : records) plausible += r.plausible() ? 1 : 0;
  out << records.size() << " trial(s), " << plausible << " plausible; records under " << (fs::path(o.out) / "trials").string()
      << "\n";
}

void run_report(const Options& o, std::ostream& out) {
  auto bugs = load_manifest(o.manifest);
  auto records = read_trial_records(o.out);
  auto dir = fs::path(o.out) / "report";
  metrics::write_report(dir, records, bugs);
  out << "report for " << records.size() << " record(s) written to " << dir.string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bug localization and repair harness driven by software artifacts"};
  app.name("devlore");
  app.require_subcommand(1);
  Options o;

  auto* lm = app.add_subcommand("localize-methods", "Stage one: predict buggy methods");
  auto* ll = app.add_subcommand("localize-lines", "Stages one and two: predict buggy lines");
  auto* rp = app.add_subcommand("repair", "Generate and validate patches for given methods");
  auto* rn = app.add_subcommand("run", "All stages for one artifact configuration");
  auto* ab = app.add_subcommand("ablate", "All stages over a list of artifact configurations");
  auto* rep = app.add_subcommand("report", "Aggregate trial records into rate, overlap and cost tables");

  for (auto* cmd : {lm, ll, rp, rn}) {
    add_corpus_options(*cmd, o, true);
    add_run_options(*cmd, o);
    cmd->add_option("--artifacts", o.artifacts, "none, or a +/, joined subset of issue, stack, debug")->capture_default_str();
  }
  for (auto* cmd : {ll, rp}) {
    cmd->add_option("--methods", o.methods, "Comma-separated class::member list, or 'truth' for the ground truth");
  }
  rp->add_flag("--no-line-hints", o.no_line_hints, "Skip line localization and repair with the empty hint set");
  add_corpus_options(*ab, o, true);
  add_run_options(*ab, o);
  ab->add_option("--configs", o.configs, "';'-separated artifact configurations")->capture_default_str();
  add_corpus_options(*rep, o, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rp->parsed() && o.methods.empty()) o.methods = "truth";
    if (lm->parsed()) run_stage_command(StageCommand::Methods, o, out, err);
    if (ll->parsed()) run_stage_command(StageCommand::Lines, o, out, err);
    if (rp->parsed()) run_stage_command(StageCommand::Repair, o, out, err);
    if (rn->parsed()) run_matrix(o, {ArtifactConfig::parse(o.artifacts)}, out, err);
    if (ab->parsed()) run_matrix(o, ArtifactConfig::parse_list(o.configs), out, err);
    if (rep->parsed()) run_report(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArtifactConfig ? kExitUsage : kExitHarness;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitHarness;
  }
  return kExitOk;
}

}  // namespace devlore::cli
