#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "misery/json.hpp"

namespace misery {

/// `feedback` is game-show feedback delivered to the contestant; on the wire
/// it is sent with the user role.
enum class Role { system, user, assistant, feedback };

std::string_view to_string(Role role);
std::string_view wire_role(Role role);
Role role_from_string(std::string_view text);

struct ChatTurn {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatTurn&) const = default;
};

class ChatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ChatError unless every turn has content, no two assistant turns are
/// adjacent, and the last turn is addressed to the model (user or feedback).
void validate_request(std::span<const ChatTurn> turns);

enum class QuestionKind { free_text, ordinal, binary, scalar, interval };

std::string_view to_string(QuestionKind kind);

/// What the harness knows about the question being asked. Black-box backends
/// ignore it; the oracle contestants answer from it.
struct QuestionContext {
  QuestionKind kind = QuestionKind::scalar;
  std::string question_id;
  double target_score = 0.0;
  std::array<double, 2> anchor_scores{};  // ordinal
  double base_score = 0.0;                // binary
  int width = 0;                          // interval
  double lo = 0.0;                        // scalar range
  double hi = 100.0;
};

/// One model call: the turns sent, the reply, and call metadata.
struct Exchange {
  std::string question_id;
  std::vector<ChatTurn> request;
  std::string reply;
  int attempts = 0;
  double latency_ms = 0.0;
  std::string backend;

  bool operator==(const Exchange&) const = default;
};

/// Append-only record of an episode's (or benchmark item's) model calls.
class Transcript {
 public:
  void append(Exchange exchange) { exchanges_.push_back(std::move(exchange)); }
  const std::vector<Exchange>& exchanges() const { return exchanges_; }
  std::size_t size() const { return exchanges_.size(); }
  bool empty() const { return exchanges_.empty(); }

  /// Latency is left out when include_timing is false so that reports built
  /// from deterministic backends are byte-stable.
  Json to_json(bool include_timing = true) const;
  static Transcript from_json(const Json& j);

  bool operator==(const Transcript&) const = default;

 private:
  std::vector<Exchange> exchanges_;
};

Json turns_to_json(std::span<const ChatTurn> turns);
std::vector<ChatTurn> turns_from_json(const Json& j);

}  // namespace misery
