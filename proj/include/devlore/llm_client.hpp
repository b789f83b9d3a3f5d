#pragma once

#include "devlore/error.hpp"
#include "devlore/money.hpp"
#include "devlore/prompt.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace devlore {

struct ModelConfig {
  std::string model_name = "gpt-4o-mini";
  double temperature = 0.5;
  double top_p = 1.0;
  std::size_t context_window_tokens = 128000;
  std::size_t response_reserve_tokens = 4096;
  Money price_per_1k_input = Money::parse("0.00015");
  Money price_per_1k_output = Money::parse("0.0006");
  int max_retries = 3;
  std::chrono::seconds request_timeout{120};
  std::string api_base = "https://api.openai.com/v1";
  std::string api_key_env = "DEVLORE_API_KEY";
  /// One request with n completions instead of n single requests.
  bool batch_samples = false;
  int max_concurrent_requests = 4;
  int requests_per_minute = 0;  // 0 = unlimited
  std::chrono::milliseconds backoff_base{1000};
};

struct UsageRecord {
  std::string stage;
  long input_tokens = 0;
  long output_tokens = 0;
  Money cost;
  double wall_time = 0.0;
  std::string request_id;

  bool operator==(const UsageRecord&) const = default;
};

Money total_cost(const std::vector<UsageRecord>& records);

struct Completion {
  std::string text;
  UsageRecord usage;
};

struct ChatRequest {
  std::string model;
  double temperature = 0.5;
  double top_p = 1.0;
  int n = 1;
  std::string system;
  std::string user;
  /// Content hash of the full prompt; replay fixtures are named after it.
  std::string prompt_hash;
  int first_index = 0;
  std::chrono::seconds timeout{120};
};

struct ChatReply {
  std::vector<std::string> texts;  // exactly request.n entries
  long input_tokens = 0;
  long output_tokens = 0;
  bool usage_reported = false;
  std::vector<std::string> request_ids;  // one per text
};

/// Transport failure. Retryable ones (network, 429, 5xx) are retried by LlmClient.
class BackendFailure : public Error {
 public:
  BackendFailure(ErrorCode code, const std::string& message, bool retryable)
      : Error(code, message), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatReply send(const ChatRequest& request) = 0;
  /// Replayed answers cost nothing.
  virtual bool billable() const { return true; }
};

/// Serves `<prompt_hash>.<index>.txt` files from a directory; never touches the network.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ChatReply send(const ChatRequest& request) override;
  bool billable() const override { return false; }

 private:
  std::filesystem::path dir_;
};

/// Forwards to another backend and stores every answer as a replay fixture.
class RecordingBackend : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {}
  ChatReply send(const ChatRequest& request) override;
  bool billable() const override { return inner_->billable(); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path dir_;
};

/// OpenAI-compatible `POST <api_base>/chat/completions`.
class HttpBackend : public ChatBackend {
 public:
  HttpBackend(std::string api_base, std::string api_key);
  ChatReply send(const ChatRequest& request) override;

 private:
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string api_key_;
};

/// Caps requests in flight and, optionally, requests started per sliding window.
class RateLimiter {
 public:
  RateLimiter(int max_concurrent, int per_window, std::chrono::milliseconds window = std::chrono::minutes(1));

  class Permit {
   public:
    explicit Permit(RateLimiter* owner) : owner_(owner) {}
    Permit(Permit&& other) noexcept : owner_(other.owner_) { other.owner_ = nullptr; }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit();

   private:
    RateLimiter* owner_;
  };

  Permit acquire();
  int peak_in_flight() const;

 private:
  using Clock = std::chrono::steady_clock;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int max_concurrent_;
  int per_window_;
  std::chrono::milliseconds window_;
  int in_flight_ = 0;
  int peak_ = 0;
  std::deque<Clock::time_point> starts_;
};

/// Thread-safe sampling front end with retries and an append-only usage ledger.
class LlmClient {
 public:
  LlmClient(ModelConfig config, std::shared_ptr<ChatBackend> backend);

  /// Exactly `n_samples` completions in request order, each with one UsageRecord.
  /// Samples are numbered from `first_sample`; replay fixtures are keyed by that number.
  std::vector<Completion> complete(const PromptTriple& prompt, int n_samples, const std::string& stage,
                                   int first_sample = 0);

  std::vector<UsageRecord> ledger() const;
  const ModelConfig& config() const { return config_; }
  const RateLimiter& limiter() const { return limiter_; }

  static std::string prompt_hash(const PromptTriple& prompt);

 private:
  ChatReply send_with_retries(const ChatRequest& request);

  ModelConfig config_;
  std::shared_ptr<ChatBackend> backend_;
  RateLimiter limiter_;
  mutable std::mutex ledger_mu_;
  std::vector<UsageRecord> ledger_;
};

}  // namespace devlore
