#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "misery/answers.hpp"
#include "misery/chat.hpp"
#include "misery/dataset.hpp"
#include "misery/gateway.hpp"
#include "misery/templates.hpp"

namespace misery {

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FeedbackMode { static_mode, adaptive };
enum class Verdict { correct, incorrect };

std::string_view to_string(FeedbackMode mode);
FeedbackMode feedback_mode_from_string(std::string_view text);
std::string_view to_string(Verdict verdict);

/// The twelve records cast in one episode.
struct EpisodeSpec {
  std::array<MiseryRecord, 2> anchors;                                // Round 1 references
  std::array<MiseryRecord, 2> r1_targets;                             // Q1, Q2
  std::array<std::pair<MiseryRecord, MiseryRecord>, 2> r2_pairs;      // (base, target) for Q3, Q4
  MiseryRecord r3_target;                                             // Q5
  std::array<MiseryRecord, 3> bonus_targets;                          // Q6, Q7, Q8

  std::vector<RecordId> cast_ids() const;
  /// Throws GameError if the cast repeats a record, the anchors tie, or a
  /// Round 2 pair ties.
  void validate() const;
  Json to_json() const;
};

/// Draws anchors (redrawn until their scores differ), Round 1 targets, two
/// Round 2 pairs (each redrawn until unequal), the Round 3 target and three
/// bonus targets, all without replacement.
EpisodeSpec sample_episode(std::span<const MiseryRecord> records, Rng& rng);

inline constexpr std::array<int, 3> kBonusWidths{30, 20, 10};

/// Truth label with inclusive anchor bounds: t == an anchor score is "between".
OrdinalLabel ordinal_truth(std::array<double, 2> anchor_scores, double target);
BinaryLabel binary_truth(double base, double target);

/// Any answer of the wrong variant (including Invalid) grades incorrect.
Verdict grade_ordinal(std::array<double, 2> anchor_scores, double target, const ParsedAnswer& answer);
Verdict grade_binary(double base, double target, const ParsedAnswer& answer);
Verdict grade_interval(double truth, const ParsedAnswer& answer, int required_width);

struct FeedbackMessage {
  Verdict verdict;
  std::string label;  // the correct answer
  double score;       // the target's true misery index

  std::string render(const PromptTemplates& templates) const;
};

struct QuestionResult {
  std::string id;  // "Q1" .. "Q8"
  QuestionKind kind = QuestionKind::ordinal;
  RecordId target_id = 0;
  double truth = 0.0;
  std::string truth_label;
  ParsedAnswer answer = InvalidAnswer{};
  Verdict verdict = Verdict::incorrect;
  int reprompts = 0;
  std::optional<double> distance;  // Q5 only, when valid

  Json to_json() const;
};

enum class EpisodeStatus { completed, failed };

struct EpisodeResult {
  std::size_t index = 0;
  EpisodeStatus status = EpisodeStatus::completed;
  std::string error;
  EpisodeSpec spec;
  std::vector<QuestionResult> questions;
  Transcript transcript;

  Json to_json(bool include_timing) const;
};

struct GameOptions {
  FeedbackMode mode = FeedbackMode::static_mode;
  int reprompt_budget = 1;
  const PromptTemplates* templates = &PromptTemplates::builtin();
};

/// Asks Q1..Q8 in order. Adaptive mode keeps one running conversation and
/// inserts a feedback turn after every graded question; static mode sends each
/// question as its own conversation. A backend failure marks the episode
/// failed and stops it.
EpisodeResult run_episode(const EpisodeSpec& spec, ModelClient& client, const GameOptions& options,
                          std::size_t index = 0);

struct InvalidCounts {
  std::size_t ordinal = 0;
  std::size_t binary = 0;
  std::size_t scalar = 0;
  std::size_t interval = 0;
};

struct GameReport {
  std::string model;
  std::uint64_t seed = 0;
  FeedbackMode mode = FeedbackMode::static_mode;
  double round1 = 0.0;  // %
  double round2 = 0.0;
  double bonus = 0.0;
  double overall = 0.0;
  std::optional<double> avg_distance_r3;
  std::size_t episodes_completed = 0;
  std::size_t episodes_failed = 0;
  std::size_t q5_invalid = 0;
  InvalidCounts invalid;
  std::vector<EpisodeResult> episodes;

  /// Keys follow the game-show results table columns. Transcripts are embedded
  /// without timing so deterministic runs serialize identically.
  Json to_json(bool include_episodes = true) const;
};

inline constexpr const char* kRound1Label = "Round 1 Accuracy (%)";
inline constexpr const char* kRound2Label = "Round 2 Accuracy (%)";
inline constexpr const char* kBonusLabel = "Bonus Round Accuracy (%)";
inline constexpr const char* kOverallLabel = "Overall Accuracy (%)";
inline constexpr const char* kDistanceLabel = "Avg. Distance in Round 3";

/// (2 r1 + 2 r2 + 3 bonus) / 7: each round weighted by its question count.
double overall_accuracy(double round1, double round2, double bonus);

/// Accuracies over completed episodes: Round 1 over {Q1,Q2}, Round 2 over
/// {Q3,Q4}, bonus over {Q6,Q7,Q8}; mean |Q5 - truth| over valid Q5 answers.
GameReport aggregate(std::vector<EpisodeResult> episodes, std::string model, std::uint64_t seed, FeedbackMode mode);

}  // namespace misery
