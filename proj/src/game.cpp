#include "misery/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace misery {

std::string_view to_string(FeedbackMode mode) { return mode == FeedbackMode::adaptive ? "adaptive" : "static"; }

FeedbackMode feedback_mode_from_string(std::string_view text) {
  if (text == "static" || text == "off") return FeedbackMode::static_mode;
  if (text == "adaptive" || text == "on") return FeedbackMode::adaptive;
  throw GameError("unknown feedback mode '" + std::string(text) + "'");
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::correct ? "correct" : "incorrect"; }

// ---------------------------------------------------------------------------
// Episode casting

std::vector<RecordId> EpisodeSpec::cast_ids() const {
  return {anchors[0].id,          anchors[1].id,          r1_targets[0].id,       r1_targets[1].id,
          r2_pairs[0].first.id,   r2_pairs[0].second.id,  r2_pairs[1].first.id,   r2_pairs[1].second.id,
          r3_target.id,           bonus_targets[0].id,    bonus_targets[1].id,    bonus_targets[2].id};
}

void EpisodeSpec::validate() const {
  const auto ids = cast_ids();
  if (std::set<RecordId>(ids.begin(), ids.end()).size() != ids.size()) throw GameError("episode cast repeats a record");
  if (anchors[0].score == anchors[1].score) throw GameError("episode anchors share a score");
  for (const auto& [base, target] : r2_pairs) {
    if (base.score == target.score) throw GameError("round 2 pair shares a score");
  }
}

Json EpisodeSpec::to_json() const {
  Json j;
  j["anchors"] = {anchors[0].id, anchors[1].id};
  j["r1_targets"] = {r1_targets[0].id, r1_targets[1].id};
  j["r2_pairs"] = {Json::array({r2_pairs[0].first.id, r2_pairs[0].second.id}),
                   Json::array({r2_pairs[1].first.id, r2_pairs[1].second.id})};
  j["r3_target"] = r3_target.id;
  j["bonus_targets"] = {bonus_targets[0].id, bonus_targets[1].id, bonus_targets[2].id};
  return j;
}

namespace {

class CastDraw {
 public:
  CastDraw(std::span<const MiseryRecord> records, Rng& rng) : records_(records), rng_(rng) {
    for (std::size_t i = 0; i < records.size(); ++i) avail_.push_back(i);
  }

  const MiseryRecord& one() {
    const auto j = static_cast<std::size_t>(rng_.uniform_below(avail_.size()));
    const std::size_t idx = avail_[j];
    avail_.erase(avail_.begin() + static_cast<std::ptrdiff_t>(j));
    return records_[idx];
  }

  std::pair<MiseryRecord, MiseryRecord> unequal_pair(const char* what) {
    const bool possible = std::any_of(avail_.begin(), avail_.end(), [&](std::size_t i) {
      return records_[i].score != records_[avail_.front()].score;
    });
    if (avail_.size() < 2 || !possible) {
      throw GameError(std::string("cannot cast ") + what + ": remaining records all share one score");
    }
    for (;;) {
      const auto m = avail_.size();
      const auto a = static_cast<std::size_t>(rng_.uniform_below(m));
      auto b = static_cast<std::size_t>(rng_.uniform_below(m - 1));
      if (b >= a) ++b;
      if (records_[avail_[a]].score == records_[avail_[b]].score) continue;
      std::pair<MiseryRecord, MiseryRecord> out{records_[avail_[a]], records_[avail_[b]]};
      avail_.erase(avail_.begin() + static_cast<std::ptrdiff_t>(std::max(a, b)));
      avail_.erase(avail_.begin() + static_cast<std::ptrdiff_t>(std::min(a, b)));
      return out;
    }
  }

 private:
  std::span<const MiseryRecord> records_;
  Rng& rng_;
  std::vector<std::size_t> avail_;
};

}  // namespace

EpisodeSpec sample_episode(std::span<const MiseryRecord> records, Rng& rng) {
  if (records.size() < 12) {
    throw GameError("an episode needs 12 distinct records, dataset has " + std::to_string(records.size()));
  }
  CastDraw draw(records, rng);
  EpisodeSpec spec;
  auto anchors = draw.unequal_pair("anchors");
  spec.anchors = {anchors.first, anchors.second};
  spec.r1_targets = {draw.one(), draw.one()};
  spec.r2_pairs[0] = draw.unequal_pair("round 2 pair");
  spec.r2_pairs[1] = draw.unequal_pair("round 2 pair");
  spec.r3_target = draw.one();
  spec.bonus_targets = {draw.one(), draw.one(), draw.one()};
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Grading

OrdinalLabel ordinal_truth(std::array<double, 2> anchor_scores, double target) {
  const double a = std::min(anchor_scores[0], anchor_scores[1]);
  const double b = std::max(anchor_scores[0], anchor_scores[1]);
  if (target < a) return OrdinalLabel::below;
  if (target > b) return OrdinalLabel::above;
  return OrdinalLabel::between;
}

BinaryLabel binary_truth(double base, double target) { return target > base ? BinaryLabel::higher : BinaryLabel::lower; }

Verdict grade_ordinal(std::array<double, 2> anchor_scores, double target, const ParsedAnswer& answer) {
  const auto* a = std::get_if<OrdinalAnswer>(&answer);
  return a != nullptr && a->label == ordinal_truth(anchor_scores, target) ? Verdict::correct : Verdict::incorrect;
}

Verdict grade_binary(double base, double target, const ParsedAnswer& answer) {
  const auto* a = std::get_if<BinaryAnswer>(&answer);
  return a != nullptr && a->label == binary_truth(base, target) ? Verdict::correct : Verdict::incorrect;
}

Verdict grade_interval(double truth, const ParsedAnswer& answer, int required_width) {
  const auto* a = std::get_if<IntervalAnswer>(&answer);
  if (a == nullptr) return Verdict::incorrect;
  const bool width_ok = a->hi - a->lo == required_width;
  const bool contains = a->lo <= truth && truth <= a->hi;
  return width_ok && contains ? Verdict::correct : Verdict::incorrect;
}

std::string FeedbackMessage::render(const PromptTemplates& templates) const {
  return templates.render("game_feedback",
                          {{"verdict", std::string(to_string(verdict))}, {"label", label}, {"score", format_score(score)}});
}

// ---------------------------------------------------------------------------
// Episode execution

Json QuestionResult::to_json() const {
  Json j;
  j["id"] = id;
  j["kind"] = misery::to_string(kind);
  j["target"] = target_id;
  j["truth"] = truth;
  j["truth_label"] = truth_label;
  j["answer"] = misery::to_json(answer);
  j["verdict"] = misery::to_string(verdict);
  j["reprompts"] = reprompts;
  if (distance) j["distance"] = *distance;
  return j;
}

Json EpisodeResult::to_json(bool include_timing) const {
  Json j;
  j["index"] = index;
  j["status"] = status == EpisodeStatus::completed ? "completed" : "failed";
  if (!error.empty()) j["error"] = error;
  j["cast"] = spec.to_json();
  Json qs = Json::array();
  for (const auto& q : questions) qs.push_back(q.to_json());
  j["questions"] = std::move(qs);
  j["transcript"] = transcript.to_json(include_timing);
  return j;
}

namespace {

struct Question {
  std::string id;
  QuestionContext context;
  std::string prompt;
  RecordId target_id;
  std::string reprompt;
};

std::vector<Question> build_questions(const EpisodeSpec& spec, const PromptTemplates& t) {
  std::vector<Question> qs;
  const std::array<double, 2> anchor_scores{spec.anchors[0].score, spec.anchors[1].score};
  for (int i = 0; i < 2; ++i) {
    const auto& target = spec.r1_targets[i];
    QuestionContext ctx;
    ctx.kind = QuestionKind::ordinal;
    ctx.question_id = "Q" + std::to_string(i + 1);
    ctx.target_score = target.score;
    ctx.anchor_scores = anchor_scores;
    qs.push_back({ctx.question_id, ctx,
                  t.render("game_ordinal", {{"anchor_a", spec.anchors[0].statement},
                                            {"anchor_a_score", format_score(spec.anchors[0].score)},
                                            {"anchor_b", spec.anchors[1].statement},
                                            {"anchor_b_score", format_score(spec.anchors[1].score)},
                                            {"target", target.statement}}),
                  target.id, t.text("reprompt_ordinal")});
  }
  for (int i = 0; i < 2; ++i) {
    const auto& [base, target] = spec.r2_pairs[i];
    QuestionContext ctx;
    ctx.kind = QuestionKind::binary;
    ctx.question_id = "Q" + std::to_string(i + 3);
    ctx.target_score = target.score;
    ctx.base_score = base.score;
    qs.push_back({ctx.question_id, ctx,
                  t.render("game_binary", {{"base", base.statement},
                                           {"base_score", format_score(base.score)},
                                           {"target", target.statement}}),
                  target.id, t.text("reprompt_binary")});
  }
  {
    QuestionContext ctx;
    ctx.kind = QuestionKind::scalar;
    ctx.question_id = "Q5";
    ctx.target_score = spec.r3_target.score;
    ctx.lo = 1.0;
    ctx.hi = 100.0;
    qs.push_back({"Q5", ctx, t.render("game_scalar", {{"target", spec.r3_target.statement}}), spec.r3_target.id,
                  t.text("reprompt_scalar")});
  }
  for (int i = 0; i < 3; ++i) {
    const auto& target = spec.bonus_targets[i];
    const int w = kBonusWidths[i];
    QuestionContext ctx;
    ctx.kind = QuestionKind::interval;
    ctx.question_id = "Q" + std::to_string(i + 6);
    ctx.target_score = target.score;
    ctx.width = w;
    qs.push_back({ctx.question_id, ctx,
                  t.render("game_interval", {{"target", target.statement},
                                             {"width", std::to_string(w)},
                                             {"example_lo", std::to_string(50 - w / 2)},
                                             {"example_hi", std::to_string(50 - w / 2 + w)}}),
                  target.id, t.render("reprompt_interval", {{"width", std::to_string(w)}})});
  }
  return qs;
}

Verdict grade(const QuestionContext& ctx, const ParsedAnswer& answer) {
  switch (ctx.kind) {
    case QuestionKind::ordinal: return grade_ordinal(ctx.anchor_scores, ctx.target_score, answer);
    case QuestionKind::binary: return grade_binary(ctx.base_score, ctx.target_score, answer);
    case QuestionKind::interval: return grade_interval(ctx.target_score, answer, ctx.width);
    case QuestionKind::scalar:
    case QuestionKind::free_text: break;
  }
  // Round 3 is scored by distance; for feedback purposes a prediction is
  // correct when it rounds to the true score.
  if (const auto* s = std::get_if<ScalarAnswer>(&answer)) {
    return std::abs(s->value - ctx.target_score) < 0.5 ? Verdict::correct : Verdict::incorrect;
  }
  return Verdict::incorrect;
}

std::string assistant_content(const std::string& reply) { return reply.empty() ? "(no reply)" : reply; }

}  // namespace

EpisodeResult run_episode(const EpisodeSpec& spec, ModelClient& client, const GameOptions& options,
                          std::size_t index) {
  const PromptTemplates& templates = *options.templates;
  EpisodeResult result;
  result.index = index;
  result.spec = spec;

  const ChatTurn system{Role::system, templates.text("game_system")};
  std::vector<ChatTurn> conversation{system};
  const auto questions = build_questions(spec, templates);

  try {
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
      const auto& q = questions[qi];
      if (options.mode == FeedbackMode::static_mode) conversation = {system};
      conversation.push_back({Role::user, q.prompt});

      std::string reply = client.complete(conversation, result.transcript, &q.context, q.id);
      ParsedAnswer answer = parse_answer(q.context, reply);
      int reprompts = 0;
      while (is_invalid(answer) && reprompts < options.reprompt_budget) {
        conversation.push_back({Role::assistant, assistant_content(reply)});
        conversation.push_back({Role::user, q.reprompt});
        reply = client.complete(conversation, result.transcript, &q.context, q.id);
        answer = parse_answer(q.context, reply);
        ++reprompts;
      }
      conversation.push_back({Role::assistant, assistant_content(reply)});

      QuestionResult qr;
      qr.id = q.id;
      qr.kind = q.context.kind;
      qr.target_id = q.target_id;
      qr.truth = q.context.target_score;
      Rng exact(0);
      qr.truth_label = oracle_reply(q.context, 0.0, exact);
      qr.answer = answer;
      qr.verdict = grade(q.context, answer);
      qr.reprompts = reprompts;
      if (const auto* s = std::get_if<ScalarAnswer>(&answer)) qr.distance = std::abs(s->value - qr.truth);
      result.questions.push_back(qr);

      if (options.mode == FeedbackMode::adaptive && qi + 1 < questions.size()) {
        const FeedbackMessage fb{qr.verdict, qr.truth_label, qr.truth};
        conversation.push_back({Role::feedback, fb.render(templates)});
      }
    }
  } catch (const GatewayError& e) {
    result.status = EpisodeStatus::failed;
    result.error = e.what();
  } catch (const ConfigError& e) {
    result.status = EpisodeStatus::failed;
    result.error = e.what();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Aggregation

double overall_accuracy(double round1, double round2, double bonus) {
  return (2.0 * round1 + 2.0 * round2 + 3.0 * bonus) / 7.0;
}

GameReport aggregate(std::vector<EpisodeResult> episodes, std::string model, std::uint64_t seed, FeedbackMode mode) {
  GameReport report;
  report.model = std::move(model);
  report.seed = seed;
  report.mode = mode;

  std::size_t r1 = 0, r2 = 0, bonus = 0, valid_q5 = 0;
  double distance_sum = 0.0;
  for (const auto& ep : episodes) {
    if (ep.status != EpisodeStatus::completed) {
      ++report.episodes_failed;
      continue;
    }
    ++report.episodes_completed;
    for (const auto& q : ep.questions) {
      const bool ok = q.verdict == Verdict::correct;
      const bool bad = is_invalid(q.answer);
      switch (q.kind) {
        case QuestionKind::ordinal:
          r1 += ok;
          report.invalid.ordinal += bad;
          break;
        case QuestionKind::binary:
          r2 += ok;
          report.invalid.binary += bad;
          break;
        case QuestionKind::interval:
          bonus += ok;
          report.invalid.interval += bad;
          break;
        case QuestionKind::scalar:
          report.invalid.scalar += bad;
          if (q.distance) {
            distance_sum += *q.distance;
            ++valid_q5;
          } else {
            ++report.q5_invalid;
          }
          break;
        case QuestionKind::free_text:
          break;
      }
    }
  }
  if (report.episodes_completed == 0) throw GameError("no completed episodes to aggregate");
  const double n = static_cast<double>(report.episodes_completed);
  report.round1 = 100.0 * static_cast<double>(r1) / (2.0 * n);
  report.round2 = 100.0 * static_cast<double>(r2) / (2.0 * n);
  report.bonus = 100.0 * static_cast<double>(bonus) / (3.0 * n);
  report.overall = overall_accuracy(report.round1, report.round2, report.bonus);
  if (valid_q5 > 0) report.avg_distance_r3 = distance_sum / static_cast<double>(valid_q5);
  report.episodes = std::move(episodes);
  return report;
}

Json GameReport::to_json(bool include_episodes) const {
  Json j;
  j["kind"] = "game_report";
  j["model"] = model;
  j["seed"] = seed;
  j["feedback_mode"] = misery::to_string(mode);
  j[kRound1Label] = round1;
  j[kRound2Label] = round2;
  j[kBonusLabel] = bonus;
  j[kOverallLabel] = overall;
  j[kDistanceLabel] = avg_distance_r3 ? Json(*avg_distance_r3) : Json(nullptr);
  j["episodes_completed"] = episodes_completed;
  j["episodes_failed"] = episodes_failed;
  j["q5_invalid"] = q5_invalid;
  j["invalid_answers"] = {{"ordinal", invalid.ordinal},
                          {"binary", invalid.binary},
                          {"scalar", invalid.scalar},
                          {"interval", invalid.interval}};
  if (include_episodes) {
    Json eps = Json::array();
    for (const auto& e : episodes) eps.push_back(e.to_json(false));
    j["episodes"] = std::move(eps);
  }
  return j;
}

}  // namespace misery
