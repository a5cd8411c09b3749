#include "misery/benchmark.hpp"

#include "misery/answers.hpp"
#include "misery/exemplars.hpp"

namespace misery {

Json BenchmarkResult::to_json(bool include_transcript) const {
  Json j;
  j["kind"] = "benchmark";
  j["model"] = model;
  j["strategy"] = to_string(strategy.kind);
  j["k"] = strategy.k ? Json(*strategy.k) : Json(nullptr);
  j["label"] = strategy.label();
  j["metrics"] = metrics ? metrics->to_json() : Json(nullptr);
  j["failures"] = failures;
  j["aborted"] = aborted;
  if (!fixed_exemplars.empty()) j["fixed_exemplars"] = fixed_exemplars;
  if (!embedder.empty()) j["embedder"] = embedder;
  Json preds = Json::array();
  for (const auto& p : predictions) {
    Json e{{"id", p.id}, {"truth", p.truth}, {"predicted", p.predicted ? Json(*p.predicted) : Json(nullptr)},
           {"reply", p.reply}};
    if (!p.error.empty()) e["error"] = p.error;
    preds.push_back(std::move(e));
  }
  j["predictions"] = std::move(preds);
  if (include_transcript) j["transcript"] = transcript.to_json(true);
  return j;
}

BenchmarkResult run_benchmark(std::span<const MiseryRecord> records, ModelClient& client, const std::string& model,
                              const PromptStrategy& strategy, const BenchmarkOptions& options) {
  const PromptTemplates& templates = *options.templates;
  BenchmarkResult result;
  result.model = model;
  result.strategy = strategy;

  std::optional<ExemplarSelector> selector;
  if (strategy.few_shot()) {
    if (strategy.kind == StrategyKind::few_shot_fixed) {
      result.fixed_exemplars = default_fixed_order(records, static_cast<std::size_t>(*strategy.k), options.seed);
    }
    if (strategy.kind == StrategyKind::few_shot_embedding) {
      if (options.embedder == nullptr) throw PromptError("embedding strategy needs an embedding provider");
      result.embedder = options.embedder->identity();
    }
    selector.emplace(strategy, options.seed, result.fixed_exemplars, options.embedder, options.cache);
  }

  const double allowed_failures = options.failure_threshold * static_cast<double>(records.size());
  std::vector<PredictionPair> pairs;
  std::size_t invalid = 0;

  for (const auto& record : records) {
    BenchmarkPrediction pred{record.id, record.score, std::nullopt, {}, {}};
    QuestionContext ctx;
    ctx.kind = QuestionKind::scalar;
    ctx.question_id = "bench:" + std::to_string(record.id);
    ctx.target_score = record.score;
    ctx.lo = 0.0;
    ctx.hi = 100.0;
    try {
      switch (strategy.kind) {
        case StrategyKind::zero_shot:
          pred.reply = client.complete(build_zero_shot(record.statement, templates), result.transcript, &ctx,
                                       ctx.question_id);
          break;
        case StrategyKind::cot_two_stage: {
          const CotPrompt cot(record.statement, templates);
          QuestionContext reason_ctx = ctx;
          reason_ctx.kind = QuestionKind::free_text;
          const std::string reasoning =
              client.complete(cot.reasoning_stage(), result.transcript, &reason_ctx, ctx.question_id + ":reason");
          pred.reply = client.complete(cot.scoring_stage(trim(reasoning).empty() ? "(no reasoning)" : reasoning),
                                       result.transcript, &ctx, ctx.question_id);
          break;
        }
        default: {
          const auto pool = ExemplarPool::leave_one_out(records, record);
          const auto exemplars = selector->select(pool, record);
          pred.reply = client.complete(build_few_shot(record.statement, exemplars, templates), result.transcript,
                                       &ctx, ctx.question_id);
          break;
        }
      }
      pred.predicted = parse_scalar(pred.reply, 0.0, 100.0);
      if (pred.predicted) {
        pairs.push_back({*pred.predicted, record.score});
      } else {
        ++invalid;
      }
    } catch (const GatewayError& e) {
      pred.error = e.what();
      ++result.failures;
    } catch (const EmbeddingError& e) {
      pred.error = e.what();
      ++result.failures;
    }
    result.predictions.push_back(std::move(pred));
    if (static_cast<double>(result.failures) > allowed_failures) {
      result.aborted = true;
      break;
    }
  }
  if (pairs.size() >= 2) result.metrics = evaluate_run_lenient(pairs, invalid);
  return result;
}

}  // namespace misery
