#include "scripted_backend.hpp"

#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <nlohmann/json.hpp>

namespace devlore::tooling {

ScriptedBackend::ScriptedBackend(const std::filesystem::path& script_path) {
  auto doc = nlohmann::json::parse(text::read_file(script_path));
  const auto& fb = doc.at("fallback");
  fallback_method_ = fb.at("method").get<std::string>();
  fallback_lines_ = fb.at("lines").get<std::string>();
  fallback_repair_ = fb.at("repair").get<std::string>();
  auto read = [](const nlohmann::json& j, Script base) {
    if (j.contains("method")) base.method = j["method"].get<std::vector<std::string>>();
    if (j.contains("lines")) base.lines = j["lines"].get<std::vector<std::string>>();
    if (j.contains("repair")) base.repair = j["repair"].get<std::vector<std::vector<std::string>>>();
    return base;
  };
  for (const auto& [id, s] : doc.at("bugs").items()) {
    auto script = read(s, {});
    if (s.contains("configs")) {
      for (const auto& [label, override_] : s["configs"].items()) scripts_[id + "/" + label] = read(override_, script);
    }
    scripts_[id] = std::move(script);
  }
}

void ScriptedBackend::set_trial(const std::string& bug_id, const std::string& config_label) {
  std::lock_guard lock(mu_);
  bug_ = bug_id;
  config_ = config_label;
  repair_rounds_.clear();
}

std::string ScriptedBackend::answer(const ChatRequest& request, int index) {
  auto it = scripts_.find(bug_ + "/" + config_);
  if (it == scripts_.end()) it = scripts_.find(bug_);
  const Script* s = it == scripts_.end() ? nullptr : &it->second;
  auto idx = static_cast<std::size_t>(index);
  // The task text tells the stages apart: both localization rows name their answer unit.
  if (request.system.find("line number in class") != std::string::npos) {
    if (s && !s->lines.empty()) return s->lines[idx % s->lines.size()];
    return fallback_lines_;
  }
  if (request.system.find("method names or field names") != std::string::npos) {
    return s && idx < s->method.size() ? s->method[idx] : fallback_method_;
  }
  auto [pos, fresh] = repair_rounds_.emplace(request.prompt_hash, static_cast<int>(repair_rounds_.size()));
  auto round = static_cast<std::size_t>(pos->second);
  if (s && round < s->repair.size() && idx < s->repair[round].size()) return s->repair[round][idx];
  return fallback_repair_;
}

ChatReply ScriptedBackend::send(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  ChatReply reply;
  for (int i = 0; i < request.n; ++i) {
    reply.texts.push_back(answer(request, request.first_index + i));
    reply.request_ids.push_back("script:" + bug_ + ":" + std::to_string(request.first_index + i));
  }
  return reply;
}

}  // namespace devlore::tooling
