#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "misery/game.hpp"

namespace misery {

/// A named contestant. The factory is called once per run with the run seed,
/// so single-consumer backends (scripted queues) are never shared.
struct Contestant {
  std::string name;
  std::function<std::shared_ptr<ChatBackend>(std::uint64_t seed)> factory;
  RetryPolicy retry;
};

Contestant contestant_from_spec(const ModelSpec& spec);

struct TournamentConfig {
  std::vector<Contestant> models;
  std::vector<std::uint64_t> seeds{12, 123, 1234};
  std::vector<FeedbackMode> modes{FeedbackMode::adaptive};
  std::size_t episodes = 40;
  int reprompt_budget = 1;
  std::size_t parallelism = 1;
  const PromptTemplates* templates = &PromptTemplates::builtin();
};

struct RunStatus {
  std::string model;
  std::uint64_t seed = 0;
  FeedbackMode mode = FeedbackMode::static_mode;
  bool completed = false;
  std::string error;
};

struct TournamentResult {
  std::vector<GameReport> reports;  // completed runs, in (model, seed, mode) order
  std::vector<RunStatus> runs;      // every run, same order

  /// A (model, seed) cell is completed when every mode for it completed.
  bool completed(const std::string& model, std::uint64_t seed) const;

  /// Rows are seeds, columns models, cells ✓ or ×.
  std::string status_csv() const;

  /// Per (model, mode): per-seed round accuracies and their mean.
  Json summary_json() const;

  std::vector<std::string> model_names() const;
  std::vector<std::uint64_t> seeds() const;
};

/// Runs every (model, seed, mode) combination. Each run casts `episodes`
/// episodes from Rng(seed), so both modes of a seed see the same casts. A run
/// is completed when at least one of its episodes completes; a failing run is
/// recorded and never stops its siblings.
TournamentResult run_tournament(std::span<const MiseryRecord> records, const TournamentConfig& config);

/// Casts for `count` episodes of one seed.
std::vector<EpisodeSpec> sample_episodes(std::span<const MiseryRecord> records, std::uint64_t seed, std::size_t count);

}  // namespace misery
