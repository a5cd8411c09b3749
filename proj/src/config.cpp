#include "misery/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace misery {

namespace {

void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::benchmark: return "benchmark";
    case Command::gameshow: return "gameshow";
    case Command::report: return "report";
  }
  return "benchmark";
}

Command command_from_string(std::string_view text) {
  if (text == "benchmark") return Command::benchmark;
  if (text == "gameshow") return Command::gameshow;
  if (text == "report") return Command::report;
  throw ConfigError("unknown command '" + std::string(text) + "'");
}

std::vector<PromptStrategy> StrategyGrid::expand() const {
  std::vector<PromptStrategy> out;
  const auto probe = PromptStrategy{kind, std::nullopt};
  if (!probe.few_shot()) {
    if (!ks.empty()) throw ConfigError(std::string(to_string(kind)) + " takes no k values");
    out.push_back(PromptStrategy::make(kind));
    return out;
  }
  if (ks.empty()) throw ConfigError(std::string(to_string(kind)) + " needs at least one k");
  for (int k : ks) {
    if (k < 1) throw ConfigError("k must be >= 1");
    out.push_back(PromptStrategy::make(kind, k));
  }
  return out;
}

std::unique_ptr<Embedder> EmbeddingProviderSpec::make() const {
  if (provider == "hash") return std::make_unique<HashEmbedder>(dim);
  if (provider == "http") {
    return std::make_unique<HttpEmbedder>(
        HttpEmbedderConfig{endpoint, model, credential_env, auth_header, auth_scheme, 60.0});
  }
  throw ConfigError("unknown embedding provider '" + provider + "'");
}

std::vector<FeedbackMode> parse_feedback_flag(const std::string& text) {
  if (text == "on") return {FeedbackMode::adaptive};
  if (text == "off") return {FeedbackMode::static_mode};
  if (text == "both") return {FeedbackMode::static_mode, FeedbackMode::adaptive};
  throw ConfigError("feedback must be on, off or both (got '" + text + "')");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad seed '" + item + "'");
    }
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

Json RunConfig::to_json() const {
  Json j;
  if (command) j["command"] = misery::to_string(*command);
  j["dataset"] = dataset;
  j["output_dir"] = output_dir;
  if (!prompts_dir.empty()) j["prompts_dir"] = prompts_dir;
  Json ms = Json::array();
  for (const auto& m : models) ms.push_back(misery::to_json(m));
  j["models"] = std::move(ms);

  Json strat = Json::array();
  for (const auto& s : strategies) {
    Json e{{"kind", misery::to_string(s.kind)}};
    if (!s.ks.empty()) e["k"] = s.ks;
    strat.push_back(std::move(e));
  }
  j["benchmark"] = {{"strategies", std::move(strat)},
                    {"seed", benchmark_seed},
                    {"failure_threshold", failure_threshold}};

  Json modes_json = Json::array();
  for (auto m : modes) modes_json.push_back(misery::to_string(m));
  j["game"] = {{"seeds", seeds},
               {"modes", std::move(modes_json)},
               {"episodes", episodes},
               {"reprompt_budget", reprompt_budget}};
  j["parallelism"] = parallelism;

  Json emb{{"provider", embedding.provider}};
  if (embedding.provider == "hash") {
    emb["dim"] = embedding.dim;
  } else {
    emb["endpoint"] = embedding.endpoint;
    if (!embedding.model.empty()) emb["model"] = embedding.model;
    emb["credential_env"] = embedding.credential_env;
    emb["auth_header"] = embedding.auth_header;
    emb["auth_scheme"] = embedding.auth_scheme;
  }
  if (!embedding.cache_path.empty()) emb["cache"] = embedding.cache_path;
  j["embedding"] = std::move(emb);
  return j;
}

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"command", "dataset", "output_dir", "prompts_dir", "models", "benchmark", "game", "parallelism",
                     "embedding"},
                 "config");
  RunConfig c;
  try {
    if (j.contains("command")) c.command = command_from_string(j.at("command").get<std::string>());
    c.dataset = j.at("dataset").get<std::string>();
    c.output_dir = j.value("output_dir", "out");
    c.prompts_dir = j.value("prompts_dir", "");
    std::set<std::string> names;
    for (const auto& m : j.at("models")) {
      reject_unknown(m, {"name", "backend", "max_attempts", "endpoint", "model", "temperature", "credential_env",
                         "auth_header", "auth_scheme", "timeout_s", "replies", "cycle", "replay_file", "noise_sd"},
                     "models[]");
      c.models.push_back(model_spec_from_json(m));
      if (!names.insert(c.models.back().name).second) {
        throw ConfigError("duplicate model name '" + c.models.back().name + "'");
      }
    }
    if (c.models.empty()) throw ConfigError("config lists no models");

    if (j.contains("benchmark")) {
      const auto& b = j.at("benchmark");
      reject_unknown(b, {"strategies", "seed", "failure_threshold"}, "benchmark");
      for (const auto& s : b.value("strategies", Json::array())) {
        reject_unknown(s, {"kind", "k"}, "benchmark.strategies[]");
        StrategyGrid g;
        g.kind = strategy_kind_from_string(s.at("kind").get<std::string>());
        if (s.contains("k")) g.ks = s.at("k").is_array() ? s.at("k").get<std::vector<int>>() : std::vector<int>{s.at("k").get<int>()};
        g.expand();
        c.strategies.push_back(std::move(g));
      }
      c.benchmark_seed = b.value("seed", std::uint64_t{12});
      c.failure_threshold = b.value("failure_threshold", 0.1);
      if (!(c.failure_threshold >= 0.0 && c.failure_threshold <= 1.0)) {
        throw ConfigError("failure_threshold must lie in [0, 1]");
      }
    }
    if (j.contains("game")) {
      const auto& g = j.at("game");
      reject_unknown(g, {"seeds", "modes", "feedback", "episodes", "reprompt_budget"}, "game");
      if (g.contains("seeds")) c.seeds = g.at("seeds").get<std::vector<std::uint64_t>>();
      if (g.contains("modes")) {
        c.modes.clear();
        for (const auto& m : g.at("modes")) c.modes.push_back(feedback_mode_from_string(m.get<std::string>()));
      }
      if (g.contains("feedback")) c.modes = parse_feedback_flag(g.at("feedback").get<std::string>());
      c.episodes = g.value("episodes", std::size_t{40});
      c.reprompt_budget = g.value("reprompt_budget", 1);
      if (c.seeds.empty()) throw ConfigError("game.seeds must not be empty");
      if (c.modes.empty()) throw ConfigError("game.modes must not be empty");
      if (c.episodes == 0) throw ConfigError("game.episodes must be >= 1");
      if (c.reprompt_budget < 0) throw ConfigError("game.reprompt_budget must be >= 0");
    }
    c.parallelism = j.value("parallelism", std::size_t{1});
    if (c.parallelism == 0) throw ConfigError("parallelism must be >= 1");
    if (j.contains("embedding")) {
      const auto& e = j.at("embedding");
      reject_unknown(e, {"provider", "dim", "endpoint", "model", "credential_env", "auth_header", "auth_scheme", "cache"},
                     "embedding");
      c.embedding.provider = e.value("provider", "hash");
      c.embedding.dim = e.value("dim", std::size_t{256});
      c.embedding.endpoint = e.value("endpoint", "");
      c.embedding.model = e.value("model", "");
      c.embedding.credential_env = e.value("credential_env", "");
      c.embedding.auth_header = e.value("auth_header", "Authorization");
      c.embedding.auth_scheme = e.value("auth_scheme", "Bearer");
      c.embedding.cache_path = e.value("cache", "");
      if (c.embedding.provider != "hash" && c.embedding.provider != "http") {
        throw ConfigError("embedding.provider must be hash or http");
      }
      if (c.embedding.provider == "hash" && c.embedding.dim == 0) throw ConfigError("embedding.dim must be >= 1");
      if (c.embedding.provider == "http" && (c.embedding.endpoint.empty() || c.embedding.credential_env.empty())) {
        throw ConfigError("http embedding provider needs endpoint and credential_env");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const PromptError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const GameError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  RunConfig c = from_json(j);
  // Relative paths in the config are relative to the config file.
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  resolve(c.dataset);
  resolve(c.prompts_dir);
  resolve(c.embedding.cache_path);
  for (auto& m : c.models) resolve(m.replay_file);
  return c;
}

void RunConfig::check_paths() const {
  if (!std::filesystem::exists(dataset)) throw ConfigError("dataset '" + dataset + "' does not exist");
  if (!prompts_dir.empty() && !std::filesystem::is_directory(prompts_dir)) {
    throw ConfigError("prompts_dir '" + prompts_dir + "' does not exist");
  }
  for (const auto& m : models) {
    if (!m.replay_file.empty() && !std::filesystem::exists(m.replay_file)) {
      throw ConfigError("replay file '" + m.replay_file + "' does not exist");
    }
  }
}

}  // namespace misery
