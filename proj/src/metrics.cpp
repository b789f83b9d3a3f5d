#include "devlore/metrics.hpp"

#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace devlore::metrics {
namespace fs = std::filesystem;

bool method_hit(const std::vector<MethodLocation>& prediction, const std::vector<MethodLocation>& truth) {
  for (const auto& p : prediction) {
    if (std::find(truth.begin(), truth.end(), p) != truth.end()) return true;
  }
  return false;
}

bool top_n_hit(const std::vector<MethodLocation>& prediction, const std::vector<MethodLocation>& truth, int n) {
  if (n < 1) throw Error(ErrorCode::PreconditionViolated, "top-n needs n >= 1");
  auto k = std::min(prediction.size(), static_cast<std::size_t>(n));
  return method_hit({prediction.begin(), prediction.begin() + static_cast<std::ptrdiff_t>(k)}, truth);
}

bool line_match(const LineLocationSet& prediction, const LineAnchor& truth, const MatchSpec& spec,
                const std::map<std::string, std::string>& class_files) {
  for (const auto& [cls, lines] : prediction.entries) {
    auto it = class_files.find(cls);
    if (it == class_files.end() || it->second != truth.file) continue;
    auto lo = lines.lower_bound(truth.line - spec.n);
    if (lo != lines.end() && *lo <= truth.line + spec.n) return true;
  }
  return false;
}

const std::vector<Metric>& all_metrics() {
  static const std::vector<Metric> kAll{Metric::Method,    Metric::Top1,       Metric::Top3,       Metric::Top5,
                                        Metric::LineExact, Metric::LineRange3, Metric::LineRange5, Metric::Plausible};
  return kAll;
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::Method: return "method";
    case Metric::Top1: return "top1";
    case Metric::Top3: return "top3";
    case Metric::Top5: return "top5";
    case Metric::LineExact: return "line_exact";
    case Metric::LineRange3: return "line_range3";
    case Metric::LineRange5: return "line_range5";
    case Metric::Plausible: return "plausible";
  }
  return "?";
}

Metric parse_metric(const std::string& name) {
  for (auto m : all_metrics()) {
    if (metric_name(m) == name) return m;
  }
  throw Error(ErrorCode::PreconditionViolated, "unknown metric: " + name);
}

std::string partition_name(Partition p) {
  switch (p) {
    case Partition::All: return "all";
    case Partition::Single: return "single";
    case Partition::NonSingle: return "non_single";
  }
  return "?";
}

std::optional<int> RateCell::tenths() const {
  if (denominator <= 0) return std::nullopt;
  auto num = static_cast<long long>(hits) * 1000 + denominator / 2;
  return static_cast<int>(num / denominator);
}

std::string RateCell::to_string() const {
  auto t = tenths();
  auto head = std::to_string(hits) + "/" + std::to_string(denominator) + "=";
  if (!t) return head + "n/a";
  return head + std::to_string(*t / 10) + "." + std::to_string(*t % 10) + "%";
}

std::optional<bool> score(const TrialRecord& record, const BugCase& bug, Metric metric, std::string* reason) {
  auto exclude = [&](std::string why) -> std::optional<bool> {
    if (reason) *reason = std::move(why);
    return std::nullopt;
  };
  if (!record.available) return exclude("unavailable: " + record.unavailable_reason);
  if (!bug.ground_truth) return exclude("no ground truth");
  const auto& gt = *bug.ground_truth;
  switch (metric) {
    case Metric::Method: return method_hit(record.predicted_methods, gt.buggy_methods);
    case Metric::Top1: return top_n_hit(record.predicted_methods, gt.buggy_methods, 1);
    case Metric::Top3: return top_n_hit(record.predicted_methods, gt.buggy_methods, 3);
    case Metric::Top5: return top_n_hit(record.predicted_methods, gt.buggy_methods, 5);
    case Metric::LineExact:
    case Metric::LineRange3:
    case Metric::LineRange5: {
      if (!gt.first_added_line) return exclude("no first-added-line anchor");
      auto spec = metric == Metric::LineExact ? MatchSpec::exact() : MatchSpec::range(metric == Metric::LineRange3 ? 3 : 5);
      return std::any_of(record.unique_line_sets.begin(), record.unique_line_sets.end(), [&](const LineLocationSet& s) {
        return line_match(s, *gt.first_added_line, spec, record.class_files);
      });
    }
    case Metric::Plausible: return record.plausible();
  }
  return exclude("unknown metric");
}

namespace {

std::map<std::string, const BugCase*> index_corpus(const std::vector<BugCase>& corpus) {
  std::map<std::string, const BugCase*> out;
  for (const auto& b : corpus) out[b.id] = &b;
  return out;
}

bool in_partition(const BugCase& bug, Partition p) {
  if (p == Partition::All) return true;
  if (!bug.ground_truth) return true;  // reported as an exclusion by score()
  return bug.ground_truth->is_single_method == (p == Partition::Single);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

std::vector<std::string> config_order(const std::vector<TrialRecord>& records) {
  std::vector<ArtifactConfig> configs;
  for (const auto& r : records) {
    if (std::find(configs.begin(), configs.end(), r.config) == configs.end()) configs.push_back(r.config);
  }
  // Baseline first, then by number of artifacts, then issue/stack/debug order.
  std::sort(configs.begin(), configs.end(), [](const ArtifactConfig& a, const ArtifactConfig& b) {
    auto key = [](const ArtifactConfig& c) {
      return std::tuple(int(c.use_issue) + int(c.use_stack) + int(c.use_debug), !c.use_issue, !c.use_stack, !c.use_debug);
    };
    return key(a) < key(b);
  });
  std::vector<std::string> out;
  for (const auto& c : configs) out.push_back(c.label());
  return out;
}

}  // namespace

RateTable rates(const std::vector<TrialRecord>& records, const std::vector<BugCase>& corpus, Metric metric,
                Partition partition) {
  RateTable table;
  auto bugs = index_corpus(corpus);
  for (const auto& r : records) {
    auto it = bugs.find(r.bug_id);
    if (it == bugs.end()) {
      table.exclusions.push_back({r.bug_id, r.config.label(), "bug not in corpus"});
      continue;
    }
    if (!in_partition(*it->second, partition)) continue;
    auto& cell = table.cells[r.config.label()];
    std::string why;
    auto hit = score(r, *it->second, metric, &why);
    if (!hit) {
      table.exclusions.push_back({r.bug_id, r.config.label(), why});
      continue;
    }
    ++cell.denominator;
    if (*hit) ++cell.hits;
  }
  return table;
}

std::size_t OverlapReport::exclusive_count(const std::string& config) const { return region_count({config}); }

std::size_t OverlapReport::region_count(const std::set<std::string>& members) const {
  std::string sig;
  for (const auto& c : configs) {
    if (!members.count(c)) continue;
    if (!sig.empty()) sig += "&";
    sig += c;
  }
  auto it = regions.find(sig);
  return it == regions.end() ? 0 : it->second.size();
}

OverlapReport union_and_overlap(const std::vector<TrialRecord>& records, const std::vector<BugCase>& corpus,
                                Metric metric, Partition partition) {
  OverlapReport out;
  out.configs = config_order(records);
  auto bugs = index_corpus(corpus);
  for (const auto& c : out.configs) out.hit_sets[c];
  for (const auto& r : records) {
    auto it = bugs.find(r.bug_id);
    if (it == bugs.end() || !in_partition(*it->second, partition)) continue;
    auto hit = score(r, *it->second, metric);
    if (hit && *hit) {
      out.hit_sets[r.config.label()].insert(r.bug_id);
      out.union_set.insert(r.bug_id);
    }
  }
  for (const auto& bug : out.union_set) {
    std::string sig;
    for (const auto& c : out.configs) {
      if (!out.hit_sets[c].count(bug)) continue;
      if (!sig.empty()) sig += "&";
      sig += c;
    }
    out.regions[sig].insert(bug);
  }
  return out;
}

CostTimeSummary cost_time_summary(const std::vector<TrialRecord>& records) {
  CostTimeSummary s;
  for (const auto& r : records) {
    for (const auto& [stage, seconds] : r.stage_timings) {
      auto& st = s.stages[stage];
      st.total_seconds += seconds;
      ++st.trials;
    }
    for (const auto& u : r.usage) {
      s.total_cost += u.cost;
      s.input_tokens += u.input_tokens;
      s.output_tokens += u.output_tokens;
    }
    if (r.plausible()) ++s.plausible;
  }
  if (s.plausible > 0) s.cost_per_fix = s.total_cost.divided_by(s.plausible);
  return s;
}

void write_report(const fs::path& report_dir, const std::vector<TrialRecord>& records,
                  const std::vector<BugCase>& corpus) {
  fs::create_directories(report_dir);
  auto configs = config_order(records);
  const std::vector<Partition> partitions{Partition::All, Partition::Single, Partition::NonSingle};

  std::ostringstream md;
  md << "# Evaluation summary\n\n";
  md << records.size() << " trial records over " << configs.size() << " artifact configurations.\n\n";

  md << "## Rates\n\n| config | partition |";
  for (auto m : all_metrics()) md << " " << metric_name(m) << " |";
  md << "\n|---|---|";
  for (std::size_t i = 0; i < all_metrics().size(); ++i) md << "---|";
  md << "\n";

  std::map<Metric, std::map<Partition, RateTable>> tables;
  for (auto m : all_metrics()) {
    std::ostringstream csv;
    csv << "config,partition,hits,denominator,rate\n";
    for (auto p : partitions) {
      auto& t = tables[m][p] = rates(records, corpus, m, p);
      for (const auto& c : configs) {
        auto cell = t.cells.count(c) ? t.cells.at(c) : RateCell{};
        auto tenths = cell.tenths();
        csv << csv_field(c) << "," << partition_name(p) << "," << cell.hits << "," << cell.denominator << ","
            << (tenths ? std::to_string(*tenths / 10) + "." + std::to_string(*tenths % 10) : std::string()) << "\n";
      }
    }
    text::write_file(report_dir / ("rates_" + metric_name(m) + ".csv"), csv.str());
  }
  for (auto p : partitions) {
    for (const auto& c : configs) {
      md << "| " << c << " | " << partition_name(p) << " |";
      for (auto m : all_metrics()) {
        const auto& cells = tables[m][p].cells;
        md << " " << (cells.count(c) ? cells.at(c) : RateCell{}).to_string() << " |";
      }
      md << "\n";
    }
  }

  md << "\n## Union and overlap\n\n";
  for (auto m : all_metrics()) {
    auto ov = union_and_overlap(records, corpus, m);
    std::ostringstream csv;
    csv << "region,configs,count,bugs\n";
    for (const auto& [sig, bugs] : ov.regions) {
      auto n = std::count(sig.begin(), sig.end(), '&') + 1;
      csv << csv_field(sig) << "," << n << "," << bugs.size() << ","
          << csv_field(text::join({bugs.begin(), bugs.end()}, ";")) << "\n";
    }
    csv << "union," << ov.configs.size() << "," << ov.union_set.size() << ","
        << csv_field(text::join({ov.union_set.begin(), ov.union_set.end()}, ";")) << "\n";
    text::write_file(report_dir / ("overlap_" + metric_name(m) + ".csv"), csv.str());

    md << "### " << metric_name(m) << "\n\nUnion: " << ov.union_set.size() << " bug(s)";
    if (!ov.union_set.empty()) md << " (" << text::join({ov.union_set.begin(), ov.union_set.end()}, ", ") << ")";
    md << ".\n\n";
    if (!ov.regions.empty()) {
      md << "| hit by exactly | count | bugs |\n|---|---|---|\n";
      for (const auto& [sig, bugs] : ov.regions) {
        md << "| " << sig << " | " << bugs.size() << " | " << text::join({bugs.begin(), bugs.end()}, ", ") << " |\n";
      }
      md << "\n";
    }
  }

  std::ostringstream ct;
  ct << "config,stage,trials,mean_seconds\n";
  std::ostringstream cost;
  cost << "config,input_tokens,output_tokens,total_cost,plausible,cost_per_fix\n";
  md << "## Time and cost\n\n| config | input tokens | output tokens | total cost ($) | plausible | cost per fix ($) |\n"
     << "|---|---|---|---|---|---|\n";
  auto emit = [&](const std::string& label, const std::vector<TrialRecord>& subset) {
    auto s = cost_time_summary(subset);
    for (const auto& [stage, st] : s.stages) {
      ct << csv_field(label) << "," << stage << "," << st.trials << "," << seconds_text(st.mean()) << "\n";
    }
    auto per_fix = s.cost_per_fix ? s.cost_per_fix->to_string() : std::string();
    cost << csv_field(label) << "," << s.input_tokens << "," << s.output_tokens << "," << s.total_cost.to_string() << ","
         << s.plausible << "," << per_fix << "\n";
    md << "| " << label << " | " << s.input_tokens << " | " << s.output_tokens << " | " << s.total_cost.format(6) << " | "
       << s.plausible << " | " << (s.cost_per_fix ? s.cost_per_fix->format(6) : std::string("n/a")) << " |\n";
  };
  for (const auto& c : configs) {
    std::vector<TrialRecord> subset;
    std::copy_if(records.begin(), records.end(), std::back_inserter(subset),
                 [&](const TrialRecord& r) { return r.config.label() == c; });
    emit(c, subset);
  }
  emit("all", records);
  text::write_file(report_dir / "cost_time.csv", ct.str());
  text::write_file(report_dir / "cost.csv", cost.str());

  auto overall = cost_time_summary(records);
  if (!overall.stages.empty()) {
    md << "\n| stage | trials | mean seconds |\n|---|---|---|\n";
    for (const auto& [stage, st] : overall.stages) {
      md << "| " << stage << " | " << st.trials << " | " << seconds_text(st.mean()) << " |\n";
    }
  }

  std::set<std::tuple<std::string, std::string, std::string>> excluded;
  for (const auto& [m, by_partition] : tables) {
    for (const auto& e : by_partition.at(Partition::All).exclusions) excluded.insert({e.bug_id, e.config, e.reason});
  }
  if (!excluded.empty()) {
    md << "\n## Exclusions\n\n| bug | config | reason |\n|---|---|---|\n";
    for (const auto& [bug, config, reason] : excluded) md << "| " << bug << " | " << config << " | " << reason << " |\n";
  }
  text::write_file(report_dir / "summary.md", md.str());
}

}  // namespace devlore::metrics
