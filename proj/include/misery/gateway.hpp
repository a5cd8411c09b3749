#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "misery/chat.hpp"
#include "misery/json.hpp"
#include "misery/rng.hpp"

namespace misery {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base class for every failure that comes out of a model backend.
class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single attempt failed in a way worth retrying (connection trouble,
/// HTTP 429 or 5xx).
class TransientError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

/// Retries exhausted.
class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ProtocolError : public GatewayError {
 public:
  ProtocolError(int status, std::string body_excerpt);
  ProtocolError(int status, std::string body_excerpt, const std::string& what);
  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_; }

 private:
  int status_;
  std::string body_;
};

class ReplayExhausted : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

enum class BackendKind { http_chat, scripted, oracle, feedback_learner };

std::string_view to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view text);

/// How to reach one contestant model.
struct ModelSpec {
  std::string name;  // label used in reports
  BackendKind kind = BackendKind::oracle;

  // http_chat
  std::string endpoint;
  std::string model_name;
  double temperature = 0.0;
  std::string credential_env;
  std::string auth_header = "Authorization";
  std::string auth_scheme = "Bearer";
  double timeout_s = 60.0;

  int max_attempts = 3;

  // scripted: inline replies or a saved transcript to replay
  std::vector<std::string> replies;
  bool cycle = false;
  std::string replay_file;

  // oracle
  double noise_sd = 0.0;

  bool operator==(const ModelSpec&) const = default;
};

void validate(const ModelSpec& spec);
Json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const Json& j);

/// One attempt at a chat completion. Implementations throw TransientError for
/// retryable failures and any other GatewayError for permanent ones.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string identity() const = 0;
  virtual std::string send(std::span<const ChatTurn> turns, const QuestionContext* context) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

/// Retrying front end for a backend. The backend may be shared between
/// clients; the call counter is per client.
class ModelClient {
 public:
  ModelClient(std::shared_ptr<ChatBackend> backend, RetryPolicy policy = {});

  /// Sends `turns` (which must end with a user turn), retrying transient
  /// failures with exponential backoff, and appends the exchange to
  /// `transcript`. Failed calls are not recorded.
  std::string complete(std::span<const ChatTurn> turns, Transcript& transcript,
                       const QuestionContext* context = nullptr, std::string_view question_id = {});

  const ChatBackend& backend() const { return *backend_; }
  std::size_t calls() const { return calls_.load(); }

 private:
  std::shared_ptr<ChatBackend> backend_;
  RetryPolicy policy_;
  std::atomic<std::size_t> calls_{0};
};

/// Chat-completions JSON over HTTP(S):
///   request  {"model", "temperature", "messages": [{"role", "content"}...]}
///   reply    choices[0].message.content
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(const ModelSpec& spec);
  std::string identity() const override;
  std::string send(std::span<const ChatTurn> turns, const QuestionContext* context) override;

  static Json build_request(const ModelSpec& spec, std::span<const ChatTurn> turns);
  static std::string parse_reply(const std::string& body);

 private:
  ModelSpec spec_;
  std::string credential_;
};

/// Replays a fixed queue of replies. With `cycle` the queue never runs dry.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies, bool cycle = false, std::string label = "scripted");
  static std::shared_ptr<ScriptedBackend> from_transcript(const Transcript& transcript);

  std::string identity() const override { return label_; }
  std::string send(std::span<const ChatTurn> turns, const QuestionContext* context) override;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> queue_;
  std::vector<std::string> original_;
  std::size_t cursor_ = 0;
  bool cycle_;
  std::string label_;
};

/// Harness self-check contestant: answers from the ground truth carried in
/// the question context, perturbed by N(0, noise_sd).
class OracleBackend : public ChatBackend {
 public:
  OracleBackend(double noise_sd, std::uint64_t seed);
  std::string identity() const override;
  std::string send(std::span<const ChatTurn> turns, const QuestionContext* context) override;

 private:
  double noise_sd_;
  std::mutex mu_;
  Rng rng_;
};

/// Contestant that is deliberately wrong unless the turn right before the
/// current question is feedback reporting an incorrect answer, in which case
/// it answers from ground truth. Used to prove the feedback channel works.
class FeedbackLearnerBackend : public ChatBackend {
 public:
  std::string identity() const override { return "feedback-learner"; }
  std::string send(std::span<const ChatTurn> turns, const QuestionContext* context) override;
};

/// Exact (noise_sd = 0) or noisy answer in the format the game and benchmark
/// parsers accept. Scalars are truth + noise clamped to [lo, hi]; comparative
/// answers compare the noisy target estimate with the revealed scores;
/// intervals are centred on the estimate.
std::string oracle_reply(const QuestionContext& context, double noise_sd, Rng& rng);

/// A legal answer that is graded incorrect.
std::string wrong_reply(const QuestionContext& context);

std::string format_score(double value);

/// Builds the backend for `spec`. `run_seed` seeds stochastic backends.
std::shared_ptr<ChatBackend> make_backend(const ModelSpec& spec, std::uint64_t run_seed);
RetryPolicy retry_policy_for(const ModelSpec& spec);

}  // namespace misery
