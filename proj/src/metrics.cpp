#include "misery/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace misery {

namespace {

void require_pairs(std::span<const PredictionPair> pairs, std::size_t n, const char* what) {
  if (pairs.size() < n) {
    throw MetricError(std::string(what) + " needs at least " + std::to_string(n) + " prediction pair(s)");
  }
}

double correlation(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw MetricError("correlation undefined: one side is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void split(std::span<const PredictionPair> pairs, std::vector<double>& pred, std::vector<double>& truth) {
  pred.clear();
  truth.clear();
  for (const auto& p : pairs) {
    pred.push_back(p.predicted);
    truth.push_back(p.truth);
  }
}

}  // namespace

double mae(std::span<const PredictionPair> pairs) {
  require_pairs(pairs, 1, "MAE");
  double sum = 0.0;
  for (const auto& p : pairs) sum += std::abs(p.predicted - p.truth);
  return sum / static_cast<double>(pairs.size());
}

double rmse(std::span<const PredictionPair> pairs) {
  require_pairs(pairs, 1, "RMSE");
  double sum = 0.0;
  for (const auto& p : pairs) sum += (p.predicted - p.truth) * (p.predicted - p.truth);
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

double pearson(std::span<const PredictionPair> pairs) {
  require_pairs(pairs, 2, "Pearson correlation");
  std::vector<double> pred, truth;
  split(pairs, pred, truth);
  return correlation(pred, truth);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const PredictionPair> pairs) {
  require_pairs(pairs, 2, "Spearman correlation");
  std::vector<double> pred, truth;
  split(pairs, pred, truth);
  return correlation(average_ranks(pred), average_ranks(truth));
}

double r_squared(std::span<const PredictionPair> pairs) {
  require_pairs(pairs, 2, "R-squared");
  double mean = 0.0;
  for (const auto& p : pairs) mean += p.truth;
  mean /= static_cast<double>(pairs.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : pairs) {
    ss_res += (p.truth - p.predicted) * (p.truth - p.predicted);
    ss_tot += (p.truth - mean) * (p.truth - mean);
  }
  if (ss_tot == 0.0) throw MetricError("R-squared undefined: truths are constant");
  return 1.0 - ss_res / ss_tot;
}

MetricBundle evaluate_run(std::span<const PredictionPair> pairs, std::size_t invalid_count) {
  require_pairs(pairs, 2, "evaluate_run");
  for (const auto& p : pairs) {
    if (!(p.truth >= 0.0 && p.truth <= 100.0)) throw MetricError("truth outside [0, 100]");
    if (!std::isfinite(p.predicted)) throw MetricError("non-finite prediction");
  }
  MetricBundle b;
  b.mae = mae(pairs);
  b.rmse = rmse(pairs);
  b.pearson = pearson(pairs);
  b.spearman = spearman(pairs);
  b.r_squared = r_squared(pairs);
  b.valid_count = pairs.size();
  b.invalid_count = invalid_count;
  return b;
}

MetricBundle evaluate_run_lenient(std::span<const PredictionPair> pairs, std::size_t invalid_count) {
  require_pairs(pairs, 1, "evaluate_run");
  MetricBundle b;
  b.mae = mae(pairs);
  b.rmse = rmse(pairs);
  auto attempt = [&](double (*metric)(std::span<const PredictionPair>)) -> std::optional<double> {
    try {
      return metric(pairs);
    } catch (const MetricError&) {
      return std::nullopt;
    }
  };
  b.pearson = attempt(&pearson);
  b.spearman = attempt(&spearman);
  b.r_squared = attempt(&r_squared);
  b.valid_count = pairs.size();
  b.invalid_count = invalid_count;
  return b;
}

namespace {
Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
std::optional<double> number_or_null(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}
}  // namespace

Json MetricBundle::to_json() const {
  Json j;
  j[kMaeLabel] = mae;
  j[kRmseLabel] = rmse;
  j[kPearsonLabel] = optional_number(pearson);
  j[kSpearmanLabel] = optional_number(spearman);
  j[kR2Label] = optional_number(r_squared);
  j["valid_count"] = valid_count;
  j["invalid_count"] = invalid_count;
  return j;
}

MetricBundle MetricBundle::from_json(const Json& j) {
  MetricBundle b;
  b.mae = j.at(kMaeLabel).get<double>();
  b.rmse = j.at(kRmseLabel).get<double>();
  b.pearson = number_or_null(j.at(kPearsonLabel));
  b.spearman = number_or_null(j.at(kSpearmanLabel));
  b.r_squared = number_or_null(j.at(kR2Label));
  b.valid_count = j.at("valid_count").get<std::size_t>();
  b.invalid_count = j.at("invalid_count").get<std::size_t>();
  return b;
}

}  // namespace misery
