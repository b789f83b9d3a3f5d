#pragma once

#include "devlore/llm_client.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace devlore::tooling {

/// Answers from a hand-written script instead of a model. The stage is recognized from
/// the task text; the trial is whatever `set_trial` named last.
///
/// Script document:
///   {"fallback": {"method": s, "lines": s, "repair": s},
///    "bugs": {"<id>": {"method": [s], "lines": [s], "repair": [[s]],
///                      "configs": {"<config label>": {<any of the three keys>}}}}}
/// `lines` is indexed by sample number modulo its length; `repair[round][sample]` with
/// rounds numbered by first appearance of each distinct repair prompt since `set_trial`.
/// A `configs` entry replaces the listed keys for that artifact configuration.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(const std::filesystem::path& script_path);

  void set_trial(const std::string& bug_id, const std::string& config_label);
  ChatReply send(const ChatRequest& request) override;
  bool billable() const override { return false; }

 private:
  struct Script {
    std::vector<std::string> method;
    std::vector<std::string> lines;
    std::vector<std::vector<std::string>> repair;
  };
  std::string answer(const ChatRequest& request, int index);

  std::mutex mu_;
  std::map<std::string, Script> scripts_;  // keyed by bug id, or bug id + "/" + config label
  std::string fallback_method_, fallback_lines_, fallback_repair_;
  std::string bug_;
  std::string config_;
  std::map<std::string, int> repair_rounds_;
};

}  // namespace devlore::tooling
