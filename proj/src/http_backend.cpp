#include "devlore/llm_client.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <regex>

namespace devlore {

HttpBackend::HttpBackend(std::string api_base, std::string api_key) : api_key_(std::move(api_key)) {
  static const std::regex kBase(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(api_base, m, kBase)) {
    throw Error(ErrorCode::PreconditionViolated, "api base must look like http(s)://host[:port][/path]: " + api_base);
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].str();
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

ChatReply HttpBackend::send(const ChatRequest& request) {
  using nlohmann::json;
  if (api_key_.empty()) throw BackendFailure(ErrorCode::AuthFailure, "no API key configured", false);

  json body = {{"model", request.model},
               {"temperature", request.temperature},
               {"top_p", request.top_p},
               {"n", request.n},
               {"messages",
                json::array({{{"role", "system"}, {"content", request.system}}, {{"role", "user"}, {"content", request.user}}})}};

  httplib::Client cli(scheme_host_port_);
  cli.set_connection_timeout(std::chrono::seconds(10));
  cli.set_read_timeout(request.timeout);
  cli.set_write_timeout(request.timeout);
  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw BackendFailure(ErrorCode::EndpointUnavailable, "transport error: " + httplib::to_string(res.error()), true);
  }

  json payload = json::parse(res->body, nullptr, false);
  std::string detail;
  if (!payload.is_discarded() && payload.contains("error") && payload["error"].is_object()) {
    detail = payload["error"].value("message", "");
    auto code = payload["error"].value("code", json()).is_string() ? payload["error"]["code"].get<std::string>() : "";
    if (code == "context_length_exceeded") throw BackendFailure(ErrorCode::ContextOverflow, detail, false);
  }
  auto status = res->status;
  if (status == 401 || status == 403) throw BackendFailure(ErrorCode::AuthFailure, "HTTP " + std::to_string(status) + " " + detail, false);
  if (status == 429 || status >= 500) {
    throw BackendFailure(ErrorCode::EndpointUnavailable, "HTTP " + std::to_string(status) + " " + detail, true);
  }
  if (status != 200 || payload.is_discarded()) {
    throw BackendFailure(ErrorCode::EndpointUnavailable, "HTTP " + std::to_string(status) + " " + detail, false);
  }

  ChatReply reply;
  try {
    auto id = payload.value("id", std::string("http"));
    for (const auto& choice : payload.at("choices")) {
      reply.texts.push_back(choice.at("message").at("content").get<std::string>());
      reply.request_ids.push_back(id + ":" + std::to_string(choice.value("index", 0)));
    }
    if (payload.contains("usage")) {
      reply.input_tokens = payload["usage"].value("prompt_tokens", 0L);
      reply.output_tokens = payload["usage"].value("completion_tokens", 0L);
      reply.usage_reported = true;
    }
  } catch (const json::exception& e) {
    throw BackendFailure(ErrorCode::EndpointUnavailable, std::string("unexpected response shape: ") + e.what(), true);
  }
  return reply;
}

}  // namespace devlore
