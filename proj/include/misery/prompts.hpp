#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "misery/chat.hpp"
#include "misery/dataset.hpp"
#include "misery/templates.hpp"

namespace misery {

class PromptError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class StrategyKind { zero_shot, cot_two_stage, few_shot_fixed, few_shot_random, few_shot_embedding };

std::string_view to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(std::string_view text);

struct PromptStrategy {
  StrategyKind kind = StrategyKind::zero_shot;
  std::optional<int> k;  // few-shot kinds only

  /// Validates that k is present (and >= 1) exactly for the few-shot kinds.
  static PromptStrategy make(StrategyKind kind, std::optional<int> k = std::nullopt);

  bool few_shot() const;
  std::string label() const;  // e.g. "few_shot_fixed(k=2)"

  bool operator==(const PromptStrategy&) const = default;
};

std::vector<ChatTurn> build_zero_shot(std::string_view statement,
                                      const PromptTemplates& templates = PromptTemplates::builtin());

/// Two-pass chain of thought: a free-text reasoning request, then a scoring
/// request that embeds the reasoning verbatim.
class CotPrompt {
 public:
  explicit CotPrompt(std::string_view statement, const PromptTemplates& templates = PromptTemplates::builtin());

  const std::vector<ChatTurn>& reasoning_stage() const { return reasoning_; }
  std::vector<ChatTurn> scoring_stage(std::string_view reasoning) const;

 private:
  std::string statement_;
  const PromptTemplates* templates_;
  std::vector<ChatTurn> reasoning_;
};

inline CotPrompt build_cot(std::string_view statement,
                           const PromptTemplates& templates = PromptTemplates::builtin()) {
  return CotPrompt(statement, templates);
}

/// Exemplars are rendered in the given order, the test statement last.
std::vector<ChatTurn> build_few_shot(std::string_view statement, std::span<const MiseryRecord> exemplars,
                                     const PromptTemplates& templates = PromptTemplates::builtin());

}  // namespace misery
