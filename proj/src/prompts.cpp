#include "misery/prompts.hpp"

#include "misery/gateway.hpp"

namespace misery {

namespace {

std::string checked_statement(std::string_view statement) {
  if (trim(statement).empty()) throw PromptError("statement is empty");
  return std::string(statement);
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::zero_shot: return "zero_shot";
    case StrategyKind::cot_two_stage: return "cot_two_stage";
    case StrategyKind::few_shot_fixed: return "few_shot_fixed";
    case StrategyKind::few_shot_random: return "few_shot_random";
    case StrategyKind::few_shot_embedding: return "few_shot_embedding";
  }
  return "zero_shot";
}

StrategyKind strategy_kind_from_string(std::string_view text) {
  for (auto kind : {StrategyKind::zero_shot, StrategyKind::cot_two_stage, StrategyKind::few_shot_fixed,
                    StrategyKind::few_shot_random, StrategyKind::few_shot_embedding}) {
    if (to_string(kind) == text) return kind;
  }
  throw PromptError("unknown prompting strategy '" + std::string(text) + "'");
}

PromptStrategy PromptStrategy::make(StrategyKind kind, std::optional<int> k) {
  PromptStrategy s{kind, k};
  if (s.few_shot()) {
    if (!k || *k < 1) throw PromptError(std::string(to_string(kind)) + " needs k >= 1");
  } else if (k) {
    throw PromptError(std::string(to_string(kind)) + " takes no k");
  }
  return s;
}

bool PromptStrategy::few_shot() const {
  return kind == StrategyKind::few_shot_fixed || kind == StrategyKind::few_shot_random ||
         kind == StrategyKind::few_shot_embedding;
}

std::string PromptStrategy::label() const {
  std::string out(to_string(kind));
  if (k) out += "(k=" + std::to_string(*k) + ")";
  return out;
}

std::vector<ChatTurn> build_zero_shot(std::string_view statement, const PromptTemplates& templates) {
  const std::string s = checked_statement(statement);
  return {{Role::system, templates.text("bench_system")},
          {Role::user, templates.render("bench_zero_shot", {{"statement", s}})}};
}

CotPrompt::CotPrompt(std::string_view statement, const PromptTemplates& templates)
    : statement_(checked_statement(statement)), templates_(&templates) {
  reasoning_ = {{Role::system, templates.text("cot_reason_system")},
                {Role::user, templates.render("cot_reason", {{"statement", statement_}})}};
}

std::vector<ChatTurn> CotPrompt::scoring_stage(std::string_view reasoning) const {
  if (trim(reasoning).empty()) throw PromptError("reasoning stage produced an empty reply");
  return {{Role::system, templates_->text("bench_system")},
          {Role::user, templates_->render("cot_score", {{"statement", statement_}, {"reasoning", std::string(reasoning)}})}};
}

std::vector<ChatTurn> build_few_shot(std::string_view statement, std::span<const MiseryRecord> exemplars,
                                     const PromptTemplates& templates) {
  const std::string s = checked_statement(statement);
  if (exemplars.empty()) throw PromptError("few-shot prompt needs at least one exemplar");
  std::string block;
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    if (i > 0) block += "\n\n";
    block += templates.render("few_shot_example",
                              {{"statement", exemplars[i].statement}, {"score", format_score(exemplars[i].score)}});
  }
  return {{Role::system, templates.text("bench_system")},
          {Role::user, templates.render("few_shot", {{"examples", block}, {"statement", s}})}};
}

}  // namespace misery
