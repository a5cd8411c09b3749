#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "misery/json.hpp"

namespace misery {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that round-trips to the same double; null -> "n/a".
std::string format_number(const Json& value);

/// Benchmark grid per model: one column per strategy/k, one row per metric.
std::string render_benchmark_table(std::span<const Json> benchmark_docs);

/// With/without feedback comparison for every (model, seed) report pair and
/// every model whose summary has both modes.
std::string render_feedback_table(std::span<const Json> game_reports, std::span<const Json> summaries);

/// Per-model accuracy grid, one row per report and per summary row.
std::string render_model_table(std::span<const Json> game_reports, std::span<const Json> summaries);

/// Renders every table the documents support. Documents are recognized by
/// their "kind" field (benchmark, game_report, game_summary). Numbers are
/// copied from the documents, never recomputed.
std::string render_report(std::span<const Json> documents);

/// Every *.json document under `dir` (non-recursive) that carries a known kind.
std::vector<Json> load_report_dir(const std::string& dir);

}  // namespace misery
