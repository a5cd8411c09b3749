#include "misery/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace misery {

ProtocolError::ProtocolError(int status, std::string body_excerpt)
    : ProtocolError(status, std::move(body_excerpt), "") {}

ProtocolError::ProtocolError(int status, std::string body_excerpt, const std::string& what)
    : GatewayError(what.empty() ? "protocol error: HTTP " + std::to_string(status) + ": " + body_excerpt
                                : what + ": " + body_excerpt),
      status_(status),
      body_(std::move(body_excerpt)) {}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::http_chat: return "http_chat";
    case BackendKind::scripted: return "scripted";
    case BackendKind::oracle: return "oracle";
    case BackendKind::feedback_learner: return "feedback_learner";
  }
  return "oracle";
}

BackendKind backend_kind_from_string(std::string_view text) {
  if (text == "http_chat") return BackendKind::http_chat;
  if (text == "scripted") return BackendKind::scripted;
  if (text == "oracle") return BackendKind::oracle;
  if (text == "feedback_learner") return BackendKind::feedback_learner;
  throw ConfigError("unknown backend kind '" + std::string(text) + "'");
}

void validate(const ModelSpec& spec) {
  const std::string who = "model '" + spec.name + "': ";
  if (spec.name.empty()) throw ConfigError("model spec needs a name");
  if (!(spec.temperature >= 0.0)) throw ConfigError(who + "temperature must be >= 0");
  if (spec.max_attempts < 1) throw ConfigError(who + "max_attempts must be >= 1");
  switch (spec.kind) {
    case BackendKind::http_chat:
      if (spec.endpoint.empty()) throw ConfigError(who + "http_chat requires an endpoint");
      if (spec.credential_env.empty()) throw ConfigError(who + "http_chat requires credential_env");
      if (spec.model_name.empty()) throw ConfigError(who + "http_chat requires a model name");
      break;
    case BackendKind::scripted:
      if (spec.replies.empty() && spec.replay_file.empty()) {
        throw ConfigError(who + "scripted backend requires replies or a replay_file");
      }
      break;
    case BackendKind::oracle:
      if (!(spec.noise_sd >= 0.0)) throw ConfigError(who + "noise_sd must be >= 0");
      break;
    case BackendKind::feedback_learner:
      break;
  }
}

Json to_json(const ModelSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["backend"] = to_string(spec.kind);
  j["max_attempts"] = spec.max_attempts;
  switch (spec.kind) {
    case BackendKind::http_chat:
      j["endpoint"] = spec.endpoint;
      j["model"] = spec.model_name;
      j["temperature"] = spec.temperature;
      j["credential_env"] = spec.credential_env;
      j["auth_header"] = spec.auth_header;
      j["auth_scheme"] = spec.auth_scheme;
      j["timeout_s"] = spec.timeout_s;
      break;
    case BackendKind::scripted:
      if (!spec.replies.empty()) j["replies"] = spec.replies;
      j["cycle"] = spec.cycle;
      if (!spec.replay_file.empty()) j["replay_file"] = spec.replay_file;
      break;
    case BackendKind::oracle:
      j["noise_sd"] = spec.noise_sd;
      break;
    case BackendKind::feedback_learner:
      break;
  }
  return j;
}

ModelSpec model_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("model entry must be an object");
  ModelSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    s.kind = backend_kind_from_string(j.at("backend").get<std::string>());
    s.max_attempts = j.value("max_attempts", 3);
    s.endpoint = j.value("endpoint", "");
    s.model_name = j.value("model", "");
    s.temperature = j.value("temperature", 0.0);
    s.credential_env = j.value("credential_env", "");
    s.auth_header = j.value("auth_header", "Authorization");
    s.auth_scheme = j.value("auth_scheme", "Bearer");
    s.timeout_s = j.value("timeout_s", 60.0);
    if (j.contains("replies")) s.replies = j.at("replies").get<std::vector<std::string>>();
    s.cycle = j.value("cycle", false);
    s.replay_file = j.value("replay_file", "");
    s.noise_sd = j.value("noise_sd", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model entry: ") + e.what());
  }
  validate(s);
  return s;
}

ModelClient::ModelClient(std::shared_ptr<ChatBackend> backend, RetryPolicy policy)
    : backend_(std::move(backend)), policy_(std::move(policy)) {
  if (!backend_) throw ConfigError("ModelClient needs a backend");
  if (policy_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (!policy_.sleep) policy_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string ModelClient::complete(std::span<const ChatTurn> turns, Transcript& transcript,
                                  const QuestionContext* context, std::string_view question_id) {
  validate_request(turns);
  ++calls_;
  auto backoff = policy_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    try {
      std::string reply = backend_->send(turns, context);
      const auto elapsed = std::chrono::steady_clock::now() - start;
      Exchange ex;
      ex.question_id = std::string(question_id);
      ex.request.assign(turns.begin(), turns.end());
      ex.reply = reply;
      ex.attempts = attempt;
      ex.latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();
      ex.backend = backend_->identity();
      transcript.append(std::move(ex));
      return reply;
    } catch (const TransientError& e) {
      last_error = e.what();
      if (attempt < policy_.max_attempts) {
        policy_.sleep(backoff);
        backoff = std::chrono::milliseconds(
            static_cast<std::int64_t>(std::llround(static_cast<double>(backoff.count()) * policy_.multiplier)));
      }
    }
  }
  throw TransportError(backend_->identity() + ": giving up after " + std::to_string(policy_.max_attempts) +
                       " attempts: " + last_error);
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies, bool cycle, std::string label)
    : queue_(replies.begin(), replies.end()), original_(std::move(replies)), cycle_(cycle), label_(std::move(label)) {}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_transcript(const Transcript& transcript) {
  std::vector<std::string> replies;
  for (const auto& e : transcript.exchanges()) replies.push_back(e.reply);
  return std::make_shared<ScriptedBackend>(std::move(replies), false, "replay");
}

std::string ScriptedBackend::send(std::span<const ChatTurn>, const QuestionContext*) {
  std::lock_guard lock(mu_);
  if (cycle_) {
    if (original_.empty()) throw ReplayExhausted(label_ + ": no scripted replies");
    std::string reply = original_[cursor_ % original_.size()];
    ++cursor_;
    return reply;
  }
  if (queue_.empty()) throw ReplayExhausted(label_ + ": scripted replies exhausted");
  std::string reply = std::move(queue_.front());
  queue_.pop_front();
  return reply;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

namespace {

std::vector<std::string> replies_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open replay file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("replay file '" + path + "': " + e.what());
  }
  std::vector<std::string> replies;
  if (j.is_array()) return j.get<std::vector<std::string>>();
  // A transcript document, or a report holding episode transcripts.
  auto collect = [&](const Json& t) {
    for (const auto& e : Transcript::from_json(t).exchanges()) replies.push_back(e.reply);
  };
  if (j.contains("exchanges")) {
    collect(j);
  } else if (j.contains("episodes")) {
    for (const auto& ep : j.at("episodes")) {
      if (ep.contains("transcript")) collect(ep.at("transcript"));
    }
  } else {
    throw ConfigError("replay file '" + path + "' holds neither replies nor transcripts");
  }
  return replies;
}

}  // namespace

RetryPolicy retry_policy_for(const ModelSpec& spec) {
  RetryPolicy p;
  p.max_attempts = spec.max_attempts;
  return p;
}

std::shared_ptr<ChatBackend> make_backend(const ModelSpec& spec, std::uint64_t run_seed) {
  validate(spec);
  switch (spec.kind) {
    case BackendKind::http_chat:
      return std::make_shared<HttpChatBackend>(spec);
    case BackendKind::scripted: {
      auto replies = spec.replay_file.empty() ? spec.replies : replies_from_file(spec.replay_file);
      return std::make_shared<ScriptedBackend>(std::move(replies), spec.cycle, "scripted:" + spec.name);
    }
    case BackendKind::oracle:
      return std::make_shared<OracleBackend>(spec.noise_sd, Rng::derive(run_seed, 0x0AC1E).next());
    case BackendKind::feedback_learner:
      return std::make_shared<FeedbackLearnerBackend>();
  }
  throw ConfigError("unknown backend kind");
}

}  // namespace misery
