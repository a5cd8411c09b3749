#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "misery/benchmark.hpp"
#include "misery/config.hpp"
#include "misery/tournament.hpp"

namespace misery {

/// Narrows the configured benchmark grid from the command line.
struct BenchmarkFilter {
  std::optional<std::string> model;
  std::optional<StrategyKind> strategy;
  std::optional<int> k;
};

struct BenchmarkJob {
  const ModelSpec* model = nullptr;
  PromptStrategy strategy;
};

struct BenchmarkRun {
  std::vector<BenchmarkResult> results;  // job order; a job that threw has no result
  std::vector<std::string> errors;       // "<model> <label>: <what>"
  std::string embedder;

  /// Completed without abort and produced metrics.
  std::size_t successes() const;
};

std::vector<BenchmarkJob> plan_benchmark(const RunConfig& config, const BenchmarkFilter& filter = {});

/// One line per planned call group; no backend is constructed.
std::vector<std::string> describe_benchmark_plan(const RunConfig& config, const BenchmarkFilter& filter,
                                                 std::size_t record_count);
std::vector<std::string> describe_gameshow_plan(const RunConfig& config);

/// Runs every planned (model, strategy, k) job, up to config.parallelism at a time.
BenchmarkRun run_benchmark_grid(std::span<const MiseryRecord> records, const RunConfig& config,
                                const BenchmarkFilter& filter = {});

TournamentResult run_gameshow(std::span<const MiseryRecord> records, const RunConfig& config);

/// bench_<model>_<strategy>.json plus transcripts/ for each result.
void write_benchmark_outputs(const BenchmarkRun& run, const std::string& dir);

/// game_<model>_seed<seed>_<mode>.json, transcripts/..._ep<i>.json (with timing),
/// status.csv and game_summary.json.
void write_gameshow_outputs(const TournamentResult& result, const std::string& dir);

/// File-name safe stem: anything outside [A-Za-z0-9._-] becomes '_'.
std::string file_stem(std::string_view text);
std::string strategy_stem(const PromptStrategy& strategy);

}  // namespace misery
