#include <cstdlib>

#include <httplib.h>

#include "http_util.hpp"
#include "misery/gateway.hpp"

namespace misery {

namespace detail {

std::string excerpt(const std::string& body, std::size_t limit) {
  if (body.size() <= limit) return body;
  return body.substr(0, limit) + "...";
}

HttpResult post_json(const std::string& endpoint, const std::vector<std::pair<std::string, std::string>>& headers,
                     const std::string& body, double timeout_s) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + endpoint + "' lacks a scheme");
  const auto path_start = endpoint.find('/', scheme_end + 3);
  const std::string origin = endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

  httplib::Client client(origin);
  const auto timeout = std::chrono::duration<double>(timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  auto res = client.Post(path, hdrs, body, "application/json");
  if (!res) throw TransientError(endpoint + ": " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

void raise_for_status(const HttpResult& result, const std::string& who) {
  const std::string text = excerpt(result.body);
  if (result.status == 429 || result.status >= 500) {
    throw TransientError(who + ": HTTP " + std::to_string(result.status) + ": " + text);
  }
  throw ProtocolError(result.status, text, who + ": HTTP " + std::to_string(result.status));
}

std::string read_credential(const std::string& env_name, const std::string& who) {
  if (env_name.empty()) throw ConfigError(who + ": no credential environment variable configured");
  const char* value = std::getenv(env_name.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError(who + ": environment variable " + env_name + " is not set");
  }
  return value;
}

}  // namespace detail

HttpChatBackend::HttpChatBackend(const ModelSpec& spec) : spec_(spec) {
  validate(spec_);
  credential_ = detail::read_credential(spec_.credential_env, "model '" + spec_.name + "'");
}

std::string HttpChatBackend::identity() const { return "http_chat:" + spec_.model_name; }

Json HttpChatBackend::build_request(const ModelSpec& spec, std::span<const ChatTurn> turns) {
  Json messages = Json::array();
  for (const auto& t : turns) messages.push_back({{"role", wire_role(t.role)}, {"content", t.content}});
  Json j;
  j["model"] = spec.model_name;
  j["temperature"] = spec.temperature;
  j["messages"] = std::move(messages);
  return j;
}

std::string HttpChatBackend::parse_reply(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError(200, detail::excerpt(body), "reply is not JSON");
  }
  const auto* content = [&]() -> const Json* {
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) return nullptr;
    const auto& choice = j["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
    return &choice["message"]["content"];
  }();
  if (content == nullptr || !content->is_string()) {
    throw ProtocolError(200, detail::excerpt(body), "reply lacks choices[0].message.content");
  }
  return content->get<std::string>();
}

std::string HttpChatBackend::send(std::span<const ChatTurn> turns, const QuestionContext*) {
  std::string auth = spec_.auth_scheme.empty() ? credential_ : spec_.auth_scheme + " " + credential_;
  const auto result = detail::post_json(spec_.endpoint, {{spec_.auth_header, auth}},
                                        build_request(spec_, turns).dump(), spec_.timeout_s);
  if (result.status < 200 || result.status >= 300) detail::raise_for_status(result, identity());
  return parse_reply(result.body);
}

}  // namespace misery
