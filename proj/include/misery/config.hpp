#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "misery/embedding.hpp"
#include "misery/game.hpp"
#include "misery/gateway.hpp"
#include "misery/json.hpp"
#include "misery/prompts.hpp"

namespace misery {

enum class Command { benchmark, gameshow, report };

std::string_view to_string(Command command);
Command command_from_string(std::string_view text);

/// One benchmark strategy and the k values to sweep (empty for zero-shot/CoT).
struct StrategyGrid {
  StrategyKind kind = StrategyKind::zero_shot;
  std::vector<int> ks;

  std::vector<PromptStrategy> expand() const;
  bool operator==(const StrategyGrid&) const = default;
};

struct EmbeddingProviderSpec {
  std::string provider = "hash";  // "hash" or "http"
  std::size_t dim = 256;          // hash only
  std::string endpoint;           // http only
  std::string model;
  std::string credential_env;
  std::string auth_header = "Authorization";
  std::string auth_scheme = "Bearer";
  std::string cache_path;  // JSON sidecar; empty disables persistence

  std::unique_ptr<Embedder> make() const;
  bool operator==(const EmbeddingProviderSpec&) const = default;
};

/// Everything a run needs. Parsed from a JSON document whose schema is
/// documented in docs/config.md; unknown keys are rejected. Credentials are
/// only ever referenced by environment variable name.
struct RunConfig {
  std::optional<Command> command;
  std::string dataset;
  std::string output_dir = "out";
  std::string prompts_dir;
  std::vector<ModelSpec> models;

  // benchmark
  std::vector<StrategyGrid> strategies;
  std::uint64_t benchmark_seed = 12;
  double failure_threshold = 0.1;

  // game show
  std::vector<std::uint64_t> seeds{12, 123, 1234};
  std::vector<FeedbackMode> modes{FeedbackMode::adaptive};
  std::size_t episodes = 40;
  int reprompt_budget = 1;

  std::size_t parallelism = 1;
  EmbeddingProviderSpec embedding;

  Json to_json() const;
  static RunConfig from_json(const Json& j);
  static RunConfig load(const std::string& path);

  /// Throws ConfigError unless the dataset (and prompt dir, when set) exist.
  void check_paths() const;

  bool operator==(const RunConfig&) const = default;
};

/// "on" -> adaptive, "off" -> static, "both" -> both (static first).
std::vector<FeedbackMode> parse_feedback_flag(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace misery
