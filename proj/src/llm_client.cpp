#include "devlore/llm_client.hpp"

#include "devlore/text.hpp"

#include <random>
#include <thread>

namespace devlore {
namespace {

std::string fixture_name(const std::string& hash, int index) { return hash + "." + std::to_string(index) + ".txt"; }

}  // namespace

Money total_cost(const std::vector<UsageRecord>& records) {
  Money sum;
  for (const auto& r : records) sum += r.cost;
  return sum;
}

ChatReply ReplayBackend::send(const ChatRequest& request) {
  ChatReply reply;
  for (int i = 0; i < request.n; ++i) {
    auto name = fixture_name(request.prompt_hash, request.first_index + i);
    auto path = dir_ / name;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw Error(ErrorCode::ReplayFixtureMissing, "no fixture " + name + " (prompt changed or not recorded)");
    }
    reply.texts.push_back(text::read_file(path));
    reply.request_ids.push_back("replay:" + request.prompt_hash + "." + std::to_string(request.first_index + i));
  }
  return reply;
}

ChatReply RecordingBackend::send(const ChatRequest& request) {
  auto reply = inner_->send(request);
  for (std::size_t i = 0; i < reply.texts.size(); ++i) {
    text::write_file(dir_ / fixture_name(request.prompt_hash, request.first_index + static_cast<int>(i)), reply.texts[i]);
  }
  return reply;
}

RateLimiter::RateLimiter(int max_concurrent, int per_window, std::chrono::milliseconds window)
    : max_concurrent_(std::max(1, max_concurrent)), per_window_(per_window), window_(window) {}

RateLimiter::Permit RateLimiter::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    auto now = Clock::now();
    while (!starts_.empty() && now - starts_.front() >= window_) starts_.pop_front();
    bool slot = in_flight_ < max_concurrent_;
    bool budget = per_window_ <= 0 || static_cast<int>(starts_.size()) < per_window_;
    if (slot && budget) break;
    if (slot) {
      cv_.wait_until(lock, starts_.front() + window_);
    } else {
      cv_.wait(lock);
    }
  }
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
  starts_.push_back(Clock::now());
  return Permit(this);
}

RateLimiter::Permit::~Permit() {
  if (!owner_) return;
  {
    std::lock_guard lock(owner_->mu_);
    --owner_->in_flight_;
  }
  owner_->cv_.notify_all();
}

int RateLimiter::peak_in_flight() const {
  std::lock_guard lock(mu_);
  return peak_;
}

LlmClient::LlmClient(ModelConfig config, std::shared_ptr<ChatBackend> backend)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      limiter_(config_.max_concurrent_requests, config_.requests_per_minute) {}

std::string LlmClient::prompt_hash(const PromptTriple& prompt) { return text::sha256_hex(prompt.full_text()); }

ChatReply LlmClient::send_with_retries(const ChatRequest& request) {
  thread_local std::mt19937 jitter_rng{std::random_device{}()};
  for (int attempt = 0;; ++attempt) {
    try {
      auto permit = limiter_.acquire();
      auto reply = backend_->send(request);
      if (static_cast<int>(reply.texts.size()) != request.n) {
        throw BackendFailure(ErrorCode::EndpointUnavailable,
                             "endpoint returned " + std::to_string(reply.texts.size()) + " of " +
                                 std::to_string(request.n) + " completions",
                             true);
      }
      return reply;
    } catch (const BackendFailure& f) {
      if (!f.retryable()) throw;
      if (attempt >= config_.max_retries) {
        throw Error(ErrorCode::EndpointUnavailable,
                    "giving up after " + std::to_string(attempt + 1) + " attempts: " + std::string(f.what()));
      }
    }
    auto base = config_.backoff_base * (1 << std::min(attempt, 16));
    std::uniform_int_distribution<long> jitter(0, std::max<long>(0, static_cast<long>(base.count() / 2)));
    std::this_thread::sleep_for(base + std::chrono::milliseconds(jitter(jitter_rng)));
  }
}

std::vector<Completion> LlmClient::complete(const PromptTriple& prompt, int n_samples, const std::string& stage,
                                           int first_sample) {
  if (n_samples < 1) throw Error(ErrorCode::PreconditionViolated, "n_samples must be at least 1");
  ChatRequest base;
  base.model = config_.model_name;
  base.temperature = config_.temperature;
  base.top_p = config_.top_p;
  base.system = prompt.general_task;
  base.user = prompt.input + prompt.expected_output;
  base.prompt_hash = prompt_hash(prompt);
  base.timeout = config_.request_timeout;

  std::vector<Completion> out;
  auto collect = [&](const ChatReply& reply, double seconds) {
    auto k = static_cast<long>(reply.texts.size());
    for (long i = 0; i < k; ++i) {
      UsageRecord u;
      u.stage = stage;
      if (reply.usage_reported) {
        // A batched reply reports one total; split it so each sample has one record.
        u.input_tokens = reply.input_tokens / k + (i == 0 ? reply.input_tokens % k : 0);
        u.output_tokens = reply.output_tokens / k + (i == 0 ? reply.output_tokens % k : 0);
      } else {
        u.input_tokens = i == 0 ? static_cast<long>(prompt.estimated_tokens) : 0;
        u.output_tokens = static_cast<long>(text::estimate_tokens(reply.texts[static_cast<std::size_t>(i)]));
      }
      if (backend_->billable()) {
        u.cost = config_.price_per_1k_input.per_thousand(u.input_tokens) +
                 config_.price_per_1k_output.per_thousand(u.output_tokens);
      }
      u.wall_time = seconds / static_cast<double>(k);
      u.request_id = reply.request_ids.size() == reply.texts.size() ? reply.request_ids[static_cast<std::size_t>(i)] : "";
      out.push_back({reply.texts[static_cast<std::size_t>(i)], u});
    }
  };

  auto timed_send = [&](ChatRequest req) {
    auto t0 = std::chrono::steady_clock::now();
    auto reply = send_with_retries(req);
    collect(reply, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  if (config_.batch_samples) {
    ChatRequest req = base;
    req.n = n_samples;
    req.first_index = first_sample;
    timed_send(req);
  } else {
    for (int i = 0; i < n_samples; ++i) {
      ChatRequest req = base;
      req.first_index = first_sample + i;
      timed_send(req);
    }
  }

  // Only successful samples reach the ledger, so retries never duplicate entries.
  std::lock_guard lock(ledger_mu_);
  for (const auto& c : out) ledger_.push_back(c.usage);
  return out;
}

std::vector<UsageRecord> LlmClient::ledger() const {
  std::lock_guard lock(ledger_mu_);
  return ledger_;
}

}  // namespace devlore
