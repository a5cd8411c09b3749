#include "misery/chat.hpp"

namespace misery {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::feedback: return "feedback";
  }
  return "user";
}

std::string_view wire_role(Role role) { return role == Role::feedback ? "user" : to_string(role); }

Role role_from_string(std::string_view text) {
  if (text == "system") return Role::system;
  if (text == "user") return Role::user;
  if (text == "assistant") return Role::assistant;
  if (text == "feedback") return Role::feedback;
  throw ChatError("unknown chat role '" + std::string(text) + "'");
}

std::string_view to_string(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::free_text: return "free_text";
    case QuestionKind::ordinal: return "ordinal";
    case QuestionKind::binary: return "binary";
    case QuestionKind::scalar: return "scalar";
    case QuestionKind::interval: return "interval";
  }
  return "free_text";
}

void validate_request(std::span<const ChatTurn> turns) {
  if (turns.empty()) throw ChatError("empty chat request");
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (turns[i].content.empty()) throw ChatError("chat turn " + std::to_string(i) + " has empty content");
    if (i > 0 && turns[i].role == Role::assistant && turns[i - 1].role == Role::assistant) {
      throw ChatError("consecutive assistant turns at " + std::to_string(i));
    }
  }
  const Role last = turns.back().role;
  if (last != Role::user && last != Role::feedback) throw ChatError("chat request must end with a user turn");
}

Json turns_to_json(std::span<const ChatTurn> turns) {
  Json arr = Json::array();
  for (const auto& t : turns) arr.push_back({{"role", to_string(t.role)}, {"content", t.content}});
  return arr;
}

std::vector<ChatTurn> turns_from_json(const Json& j) {
  std::vector<ChatTurn> out;
  for (const auto& t : j) out.push_back({role_from_string(t.at("role").get<std::string>()), t.at("content").get<std::string>()});
  return out;
}

Json Transcript::to_json(bool include_timing) const {
  Json arr = Json::array();
  for (const auto& e : exchanges_) {
    Json j;
    j["question"] = e.question_id;
    j["backend"] = e.backend;
    j["attempts"] = e.attempts;
    if (include_timing) j["latency_ms"] = e.latency_ms;
    j["request"] = turns_to_json(e.request);
    j["reply"] = e.reply;
    arr.push_back(std::move(j));
  }
  return Json{{"exchanges", std::move(arr)}};
}

Transcript Transcript::from_json(const Json& j) {
  Transcript t;
  for (const auto& e : j.at("exchanges")) {
    Exchange ex;
    ex.question_id = e.at("question").get<std::string>();
    ex.backend = e.at("backend").get<std::string>();
    ex.attempts = e.at("attempts").get<int>();
    ex.latency_ms = e.value("latency_ms", 0.0);
    ex.request = turns_from_json(e.at("request"));
    ex.reply = e.at("reply").get<std::string>();
    t.append(std::move(ex));
  }
  return t;
}

}  // namespace misery
