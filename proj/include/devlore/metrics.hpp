#pragma once

#include "devlore/model.hpp"
#include "devlore/money.hpp"
#include "devlore/record.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace devlore::metrics {

struct MatchSpec {
  int n = 0;  // 0 is exact

  static MatchSpec exact() { return {0}; }
  static MatchSpec range(int n) { return {n}; }
  bool operator==(const MatchSpec&) const = default;
};

/// Any predicted (class_path, member) equals any ground-truth pair.
bool method_hit(const std::vector<MethodLocation>& prediction, const std::vector<MethodLocation>& truth);

/// method_hit over the first `n` predictions.
bool top_n_hit(const std::vector<MethodLocation>& prediction, const std::vector<MethodLocation>& truth, int n);

/// Some predicted line of a class that resolves to the anchor's file lies within
/// `spec.n` lines of the anchor. `class_files` maps class paths to workspace-relative files.
bool line_match(const LineLocationSet& prediction, const LineAnchor& truth, const MatchSpec& spec,
                const std::map<std::string, std::string>& class_files);

enum class Metric { Method, Top1, Top3, Top5, LineExact, LineRange3, LineRange5, Plausible };
enum class Partition { All, Single, NonSingle };

const std::vector<Metric>& all_metrics();
std::string metric_name(Metric m);
Metric parse_metric(const std::string& name);
std::string partition_name(Partition p);

struct RateCell {
  int hits = 0;
  int denominator = 0;

  /// Percentage in tenths, rounded half-up; nullopt when the denominator is 0.
  std::optional<int> tenths() const;
  /// `X/Y=Z%` with one decimal, e.g. `207/475=43.6%`; `X/0=n/a` for an empty denominator.
  std::string to_string() const;
  bool operator==(const RateCell&) const = default;
};

/// Why a (bug, config) record does not count towards a metric.
struct Exclusion {
  std::string bug_id;
  std::string config;
  std::string reason;
  bool operator==(const Exclusion&) const = default;
};

/// Whether `record` counts as a hit; nullopt when the record is outside the metric's
/// denominator (unavailable trial, missing ground truth, no line anchor).
std::optional<bool> score(const TrialRecord& record, const BugCase& bug, Metric metric,
                          std::string* exclusion_reason = nullptr);

struct RateTable {
  std::map<std::string, RateCell> cells;  // config label -> cell
  std::vector<Exclusion> exclusions;
};

/// Per-config rates over `records`; bugs outside `partition` are skipped silently.
RateTable rates(const std::vector<TrialRecord>& records, const std::vector<BugCase>& corpus, Metric metric,
                Partition partition);

struct OverlapReport {
  std::vector<std::string> configs;  // column order of membership signatures
  std::map<std::string, std::set<std::string>> hit_sets;
  std::set<std::string> union_set;
  /// Membership signature (configs joined with `&`) -> bugs hit by exactly those configs.
  std::map<std::string, std::set<std::string>> regions;

  /// Bugs hit by `config` and by no other config.
  std::size_t exclusive_count(const std::string& config) const;
  /// Bugs whose hitting configs are exactly `configs`.
  std::size_t region_count(const std::set<std::string>& configs) const;
};

OverlapReport union_and_overlap(const std::vector<TrialRecord>& records, const std::vector<BugCase>& corpus,
                                Metric metric, Partition partition = Partition::All);

struct StageTime {
  double total_seconds = 0.0;
  int trials = 0;
  double mean() const { return trials ? total_seconds / trials : 0.0; }
};

struct CostTimeSummary {
  std::map<std::string, StageTime> stages;  // stage -> timing over trials that ran it
  Money total_cost;
  long input_tokens = 0;
  long output_tokens = 0;
  int plausible = 0;
  /// Absent when there is no plausible fix.
  std::optional<Money> cost_per_fix;
};

CostTimeSummary cost_time_summary(const std::vector<TrialRecord>& records);

/// Writes `rates_<metric>.csv`, `overlap_<metric>.csv`, `cost_time.csv` and `summary.md`
/// into `report_dir`.
void write_report(const std::filesystem::path& report_dir, const std::vector<TrialRecord>& records,
                  const std::vector<BugCase>& corpus);

}  // namespace devlore::metrics
