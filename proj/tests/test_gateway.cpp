#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "misery/gateway.hpp"

using namespace misery;
using namespace std::chrono_literals;

namespace {

class FlakyBackend : public ChatBackend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  std::string identity() const override { return "flaky"; }
  std::string send(std::span<const ChatTurn>, const QuestionContext*) override {
    if (calls_++ < failures_) throw TransientError("busy");
    return "ok";
  }
  int calls_ = 0;

 private:
  int failures_;
};

RetryPolicy recording_policy(std::vector<std::chrono::milliseconds>& slept, int attempts = 3) {
  RetryPolicy p;
  p.max_attempts = attempts;
  p.sleep = [&slept](std::chrono::milliseconds d) { slept.push_back(d); };
  return p;
}

const std::vector<ChatTurn> kAsk{{Role::system, "be brief"}, {Role::user, "score this"}};

// Chat-completions stub on 127.0.0.1. Each request pops the next (status, body).
class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      last_key = req.get_header_value("api-key");
      ++hits;
      auto [status, body] = script.empty() ? std::pair{500, std::string("{}")} : script.front();
      if (!script.empty()) script.erase(script.begin());
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::mutex mu_;
  std::vector<std::pair<int, std::string>> script;
  std::string last_body, last_auth, last_key;
  int hits = 0;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string reply_body(const std::string& content) {
  return Json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

ModelSpec http_spec(const std::string& endpoint) {
  ModelSpec s;
  s.name = "stub";
  s.kind = BackendKind::http_chat;
  s.endpoint = endpoint;
  s.model_name = "stub-model";
  s.temperature = 0.0;
  s.credential_env = "MISERY_TEST_KEY";
  s.timeout_s = 5;
  return s;
}

}  // namespace

TEST(Gateway, RetriesTransientFailuresWithExponentialBackoff) {
  std::vector<std::chrono::milliseconds> slept;
  auto backend = std::make_shared<FlakyBackend>(2);
  ModelClient client(backend, recording_policy(slept));
  Transcript t;
  EXPECT_EQ(client.complete(kAsk, t, nullptr, "Q1"), "ok");
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{1000ms, 2000ms}));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.exchanges()[0].attempts, 3);
  EXPECT_EQ(t.exchanges()[0].question_id, "Q1");
  EXPECT_EQ(t.exchanges()[0].request, kAsk);
}

TEST(Gateway, GivesUpAfterMaxAttempts) {
  std::vector<std::chrono::milliseconds> slept;
  auto backend = std::make_shared<FlakyBackend>(5);
  ModelClient client(backend, recording_policy(slept));
  Transcript t;
  EXPECT_THROW(client.complete(kAsk, t), TransportError);
  EXPECT_EQ(backend->calls_, 3);
  EXPECT_EQ(slept.size(), 2u);
  EXPECT_TRUE(t.empty());
}

TEST(Gateway, RejectsMalformedRequestsBeforeSending) {
  auto backend = std::make_shared<FlakyBackend>(0);
  ModelClient client(backend);
  Transcript t;
  std::vector<ChatTurn> bad{{Role::user, "q"}, {Role::assistant, "a"}};
  EXPECT_THROW(client.complete(bad, t), ChatError);
  EXPECT_EQ(backend->calls_, 0);
}

TEST(Gateway, ScriptedBackendReplaysInOrder) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"a", "b"});
  ModelClient client(backend);
  Transcript t;
  EXPECT_EQ(client.complete(kAsk, t), "a");
  EXPECT_EQ(client.complete(kAsk, t), "b");
  EXPECT_EQ(backend->remaining(), 0u);
  EXPECT_THROW(client.complete(kAsk, t), ReplayExhausted);

  auto replay = ScriptedBackend::from_transcript(t);
  ModelClient again(replay);
  Transcript t2;
  EXPECT_EQ(again.complete(kAsk, t2), "a");
  EXPECT_EQ(again.complete(kAsk, t2), "b");
}

TEST(Gateway, ScriptedCycleNeverRunsDry) {
  ScriptedBackend b({"x", "y"}, true);
  for (int i = 0; i < 7; ++i) EXPECT_EQ(b.send(kAsk, nullptr), i % 2 ? "y" : "x");
}

TEST(Gateway, ModelSpecValidation) {
  ModelSpec s;
  s.name = "m";
  s.kind = BackendKind::http_chat;
  EXPECT_THROW(validate(s), ConfigError);
  s.endpoint = "http://localhost/x";
  s.model_name = "x";
  EXPECT_THROW(validate(s), ConfigError);
  s.credential_env = "SOME_KEY";
  EXPECT_NO_THROW(validate(s));
  s.kind = BackendKind::scripted;
  EXPECT_THROW(validate(s), ConfigError);
  s.kind = BackendKind::oracle;
  s.noise_sd = -1;
  EXPECT_THROW(validate(s), ConfigError);
  EXPECT_THROW(backend_kind_from_string("gpt"), ConfigError);
}

TEST(Gateway, ModelSpecJsonRoundTrip) {
  auto s = http_spec("https://example.invalid/v1/chat/completions");
  s.auth_header = "api-key";
  s.auth_scheme = "";
  EXPECT_EQ(model_spec_from_json(to_json(s)), s);
  const auto dumped = to_json(s).dump();
  EXPECT_EQ(dumped.find("secret"), std::string::npos);
}

TEST(Gateway, HttpBackendRequiresCredentialVariable) {
  ::unsetenv("MISERY_TEST_KEY");
  EXPECT_THROW(HttpChatBackend(http_spec("http://127.0.0.1:1/v1/chat/completions")), ConfigError);
}

TEST(Gateway, HttpRequestShape) {
  std::vector<ChatTurn> turns{{Role::system, "s"}, {Role::user, "q"}, {Role::assistant, "a"}, {Role::feedback, "f"}};
  const auto j = HttpChatBackend::build_request(http_spec("http://x/y"), turns);
  EXPECT_EQ(j.at("model"), "stub-model");
  EXPECT_EQ(j.at("temperature"), 0.0);
  ASSERT_EQ(j.at("messages").size(), 4u);
  EXPECT_EQ(j.at("messages")[3].at("role"), "user");
  EXPECT_EQ(j.at("messages")[3].at("content"), "f");
  EXPECT_EQ(HttpChatBackend::parse_reply(reply_body("42")), "42");
  EXPECT_THROW(HttpChatBackend::parse_reply("not json"), ProtocolError);
  EXPECT_THROW(HttpChatBackend::parse_reply("{\"choices\": []}"), ProtocolError);
}

TEST(Gateway, HttpStubEndToEnd) {
  StubServer stub;
  ::setenv("MISERY_TEST_KEY", "test-credential", 1);
  stub.script = {{200, reply_body("The answer is 61.")}};
  auto spec = http_spec(stub.endpoint());
  ModelClient client(make_backend(spec, 0));
  Transcript t;
  EXPECT_EQ(client.complete(kAsk, t), "The answer is 61.");
  EXPECT_EQ(stub.last_auth, "Bearer test-credential");
  const auto sent = Json::parse(stub.last_body);
  EXPECT_EQ(sent.at("messages")[1].at("content"), "score this");
  // the credential never reaches the transcript
  EXPECT_EQ(t.to_json().dump().find("test-credential"), std::string::npos);
}

TEST(Gateway, HttpCustomAuthHeader) {
  StubServer stub;
  ::setenv("MISERY_TEST_KEY", "k2", 1);
  stub.script = {{200, reply_body("ok")}};
  auto spec = http_spec(stub.endpoint());
  spec.auth_header = "api-key";
  spec.auth_scheme = "";
  HttpChatBackend b(spec);
  EXPECT_EQ(b.send(kAsk, nullptr), "ok");
  EXPECT_EQ(stub.last_key, "k2");
  EXPECT_TRUE(stub.last_auth.empty());
}

TEST(Gateway, HttpServerErrorsAreRetried) {
  StubServer stub;
  ::setenv("MISERY_TEST_KEY", "k", 1);
  stub.script = {{503, "{}"}, {429, "{}"}, {200, reply_body("7")}};
  std::vector<std::chrono::milliseconds> slept;
  ModelClient client(make_backend(http_spec(stub.endpoint()), 0), recording_policy(slept));
  Transcript t;
  EXPECT_EQ(client.complete(kAsk, t), "7");
  EXPECT_EQ(stub.hits, 3);
  EXPECT_EQ(t.exchanges()[0].attempts, 3);
}

TEST(Gateway, HttpClientErrorIsProtocolError) {
  StubServer stub;
  ::setenv("MISERY_TEST_KEY", "k", 1);
  stub.script = {{400, "{\"error\": \"bad request\"}"}};
  std::vector<std::chrono::milliseconds> slept;
  ModelClient client(make_backend(http_spec(stub.endpoint()), 0), recording_policy(slept));
  Transcript t;
  try {
    client.complete(kAsk, t);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.status(), 400);
  }
  EXPECT_EQ(stub.hits, 1);
  EXPECT_TRUE(slept.empty());
}

TEST(Gateway, HttpMalformedBodyIsProtocolError) {
  StubServer stub;
  ::setenv("MISERY_TEST_KEY", "k", 1);
  stub.script = {{200, "<html>oops</html>"}};
  ModelClient client(make_backend(http_spec(stub.endpoint()), 0));
  Transcript t;
  EXPECT_THROW(client.complete(kAsk, t), ProtocolError);
}

TEST(Gateway, UnreachableEndpointIsTransportError) {
  ::setenv("MISERY_TEST_KEY", "k", 1);
  std::vector<std::chrono::milliseconds> slept;
  auto spec = http_spec("http://127.0.0.1:1/v1/chat/completions");
  ModelClient client(make_backend(spec, 0), recording_policy(slept, 2));
  Transcript t;
  EXPECT_THROW(client.complete(kAsk, t), TransportError);
  EXPECT_EQ(slept.size(), 1u);
}
