#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "misery/gateway.hpp"

namespace misery {

namespace {

constexpr std::string_view kReasoning =
    "The event is upsetting because it disrupts plans, causes stress and may bring pain or embarrassment.";

std::string ordinal_label(std::array<double, 2> anchors, double value) {
  const double a = std::min(anchors[0], anchors[1]);
  const double b = std::max(anchors[0], anchors[1]);
  if (value < a) return "below";
  if (value > b) return "above";
  return "between";
}

std::string interval_text(int lo, int width) {
  return "[" + std::to_string(lo) + ", " + std::to_string(lo + width) + "]";
}

const QuestionContext& require(const QuestionContext* context, std::string_view who) {
  if (context == nullptr) throw GatewayError(std::string(who) + " needs the question context");
  return *context;
}

}  // namespace

std::string format_score(double value) {
  std::ostringstream os;
  os.precision(12);
  os << value;
  return os.str();
}

std::string oracle_reply(const QuestionContext& ctx, double noise_sd, Rng& rng) {
  const double noise = noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0;
  const double estimate = ctx.target_score + noise;
  switch (ctx.kind) {
    case QuestionKind::free_text:
      return std::string(kReasoning);
    case QuestionKind::ordinal:
      return ordinal_label(ctx.anchor_scores, estimate);
    case QuestionKind::binary:
      return estimate > ctx.base_score ? "higher" : "lower";
    case QuestionKind::scalar: {
      double value = std::clamp(estimate, ctx.lo, ctx.hi);
      if (noise_sd > 0.0) value = std::round(value * 100.0) / 100.0;
      return format_score(value);
    }
    case QuestionKind::interval: {
      const int w = ctx.width;
      int lo = static_cast<int>(std::floor(estimate)) - w / 2;
      lo = std::clamp(lo, 0, 100 - w);
      return interval_text(lo, w);
    }
  }
  return std::string(kReasoning);
}

std::string wrong_reply(const QuestionContext& ctx) {
  const double t = ctx.target_score;
  switch (ctx.kind) {
    case QuestionKind::free_text:
      return std::string(kReasoning);
    case QuestionKind::ordinal: {
      const std::string truth = ordinal_label(ctx.anchor_scores, t);
      if (truth == "below") return "above";
      if (truth == "above") return "between";
      return "below";
    }
    case QuestionKind::binary:
      return t > ctx.base_score ? "lower" : "higher";
    case QuestionKind::scalar: {
      const double off = t >= (ctx.lo + ctx.hi) / 2.0 ? t - 40.0 : t + 40.0;
      return format_score(std::clamp(off, ctx.lo, ctx.hi));
    }
    case QuestionKind::interval: {
      const int w = ctx.width;
      const int above = static_cast<int>(std::ceil(t)) + 1;
      if (above + w <= 100) return interval_text(above, w);
      return interval_text(static_cast<int>(std::floor(t)) - 1 - w, w);
    }
  }
  return std::string(kReasoning);
}

OracleBackend::OracleBackend(double noise_sd, std::uint64_t seed) : noise_sd_(noise_sd), rng_(seed) {}

std::string OracleBackend::identity() const { return "oracle:sd=" + format_score(noise_sd_); }

std::string OracleBackend::send(std::span<const ChatTurn>, const QuestionContext* context) {
  const auto& ctx = require(context, "oracle backend");
  std::lock_guard lock(mu_);
  return oracle_reply(ctx, noise_sd_, rng_);
}

std::string FeedbackLearnerBackend::send(std::span<const ChatTurn> turns, const QuestionContext* context) {
  const auto& ctx = require(context, "feedback learner");
  bool corrected = false;
  if (turns.size() >= 2 && turns[turns.size() - 2].role == Role::feedback) {
    std::string text = turns[turns.size() - 2].content;
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    corrected = text.find("incorrect") != std::string::npos;
  }
  if (corrected) {
    Rng unused(0);
    return oracle_reply(ctx, 0.0, unused);
  }
  return wrong_reply(ctx);
}

}  // namespace misery
