#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "misery/dataset.hpp"
#include "misery/embedding.hpp"
#include "misery/gateway.hpp"
#include "misery/metrics.hpp"
#include "misery/prompts.hpp"
#include "misery/templates.hpp"

namespace misery {

struct BenchmarkPrediction {
  RecordId id = 0;
  double truth = 0.0;
  std::optional<double> predicted;  // empty when unparseable or failed
  std::string reply;
  std::string error;  // backend failure, if any
};

struct BenchmarkResult {
  std::string model;
  PromptStrategy strategy;
  std::optional<MetricBundle> metrics;  // absent with fewer than 2 valid pairs
  std::vector<BenchmarkPrediction> predictions;
  std::vector<RecordId> fixed_exemplars;
  std::string embedder;
  std::size_t failures = 0;
  bool aborted = false;
  Transcript transcript;

  Json to_json(bool include_transcript = false) const;
};

struct BenchmarkOptions {
  std::uint64_t seed = 12;
  double failure_threshold = 0.1;  // abort once failures exceed this share of records
  const PromptTemplates* templates = &PromptTemplates::builtin();
  Embedder* embedder = nullptr;
  EmbeddingCache* cache = nullptr;
};

/// Leave-one-out benchmark: every record is scored with a prompt whose
/// exemplar pool excludes it. Replies are parsed as the first number in
/// [0, 100]; unparseable replies count as invalid, backend failures as
/// failures (both excluded from the metrics).
BenchmarkResult run_benchmark(std::span<const MiseryRecord> records, ModelClient& client, const std::string& model,
                              const PromptStrategy& strategy, const BenchmarkOptions& options);

}  // namespace misery
