#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "misery/json.hpp"

namespace misery {

class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PredictionPair {
  double predicted;
  double truth;
};

double mae(std::span<const PredictionPair> pairs);
double rmse(std::span<const PredictionPair> pairs);

/// Throws MetricError when either side is constant.
double pearson(std::span<const PredictionPair> pairs);

/// Pearson correlation of average ranks (tied values share the mean of the
/// ranks they span).
double spearman(std::span<const PredictionPair> pairs);

/// 1 - SS_res / SS_tot about the mean of the given truths. May be negative.
double r_squared(std::span<const PredictionPair> pairs);

/// 1-based average ranks.
std::vector<double> average_ranks(std::span<const double> values);

struct MetricBundle {
  double mae = 0.0;
  double rmse = 0.0;
  // Always set by evaluate_run; left empty only by callers that tolerate an
  // undefined correlation (e.g. a constant predictor in the benchmark).
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> r_squared;
  std::size_t valid_count = 0;
  std::size_t invalid_count = 0;

  /// Flat object keyed by the row labels of the benchmark table.
  Json to_json() const;
  static MetricBundle from_json(const Json& j);
};

inline constexpr const char* kMaeLabel = "Mean Absolute Error (MAE)";
inline constexpr const char* kRmseLabel = "Root Mean Squared Error (RMSE)";
inline constexpr const char* kPearsonLabel = "Pearson Correlation";
inline constexpr const char* kSpearmanLabel = "Spearman's Rank Correlation";
inline constexpr const char* kR2Label = "R-squared (R²)";

/// All five metrics over the valid pairs; invalid predictions are only counted.
/// Propagates MetricError from any member metric.
MetricBundle evaluate_run(std::span<const PredictionPair> pairs, std::size_t invalid_count);

/// Like evaluate_run, but leaves undefined metrics empty instead of throwing.
MetricBundle evaluate_run_lenient(std::span<const PredictionPair> pairs, std::size_t invalid_count);

}  // namespace misery
