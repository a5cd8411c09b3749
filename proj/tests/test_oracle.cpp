#include <gtest/gtest.h>

#include <cmath>

#include "misery/answers.hpp"
#include "misery/game.hpp"
#include "misery/gateway.hpp"

using namespace misery;

namespace {

QuestionContext ordinal_ctx(double a, double b, double t) {
  QuestionContext c;
  c.kind = QuestionKind::ordinal;
  c.anchor_scores = {a, b};
  c.target_score = t;
  return c;
}

QuestionContext binary_ctx(double base, double t) {
  QuestionContext c;
  c.kind = QuestionKind::binary;
  c.base_score = base;
  c.target_score = t;
  return c;
}

QuestionContext interval_ctx(double t, int w) {
  QuestionContext c;
  c.kind = QuestionKind::interval;
  c.width = w;
  c.target_score = t;
  return c;
}

QuestionContext scalar_ctx(double t, double lo = 1, double hi = 100) {
  QuestionContext c;
  c.kind = QuestionKind::scalar;
  c.target_score = t;
  c.lo = lo;
  c.hi = hi;
  return c;
}

}  // namespace

TEST(Oracle, ExactRepliesGradeCorrectEverywhere) {
  Rng rng(0);
  for (int a = 0; a <= 100; a += 7) {
    for (int b = 0; b <= 100; b += 11) {
      for (int t = 0; t <= 100; t += 3) {
        auto c = ordinal_ctx(a, b, t);
        EXPECT_EQ(grade_ordinal(c.anchor_scores, t, parse_answer(c, oracle_reply(c, 0, rng))), Verdict::correct);
        if (a != t) {
          auto bc = binary_ctx(a, t);
          EXPECT_EQ(grade_binary(a, t, parse_answer(bc, oracle_reply(bc, 0, rng))), Verdict::correct);
        }
      }
    }
  }
  for (int w : kBonusWidths) {
    for (double t = 0; t <= 100; t += 0.25) {
      auto c = interval_ctx(t, w);
      EXPECT_EQ(grade_interval(t, parse_answer(c, oracle_reply(c, 0, rng)), w), Verdict::correct) << t << " " << w;
    }
  }
  for (double t = 1; t <= 100; t += 0.5) {
    auto c = scalar_ctx(t);
    const auto a = parse_answer(c, oracle_reply(c, 0, rng));
    ASSERT_TRUE(std::holds_alternative<ScalarAnswer>(a));
    EXPECT_DOUBLE_EQ(std::get<ScalarAnswer>(a).value, t);
  }
}

TEST(Oracle, WrongRepliesAreLegalButIncorrect) {
  for (int a = 0; a <= 100; a += 9) {
    for (int b = 0; b <= 100; b += 13) {
      for (int t = 0; t <= 100; t += 4) {
        auto c = ordinal_ctx(a, b, t);
        const auto ans = parse_answer(c, wrong_reply(c));
        ASSERT_FALSE(is_invalid(ans));
        EXPECT_EQ(grade_ordinal(c.anchor_scores, t, ans), Verdict::incorrect);
        if (a != t) {
          auto bc = binary_ctx(a, t);
          const auto bans = parse_answer(bc, wrong_reply(bc));
          ASSERT_FALSE(is_invalid(bans));
          EXPECT_EQ(grade_binary(a, t, bans), Verdict::incorrect);
        }
      }
    }
  }
  for (int w : kBonusWidths) {
    for (double t = 0; t <= 100; t += 0.5) {
      auto c = interval_ctx(t, w);
      const auto ans = parse_answer(c, wrong_reply(c));
      ASSERT_FALSE(is_invalid(ans)) << wrong_reply(c);
      EXPECT_EQ(grade_interval(t, ans, w), Verdict::incorrect) << t;
    }
  }
  auto c = scalar_ctx(60);
  EXPECT_EQ(wrong_reply(c), "20");
  c = scalar_ctx(30);
  EXPECT_EQ(wrong_reply(c), "70");
}

TEST(Oracle, NoisyScalarsStayInRangeAndCentreOnTruth) {
  Rng rng(12);
  const int n = 20000;
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    auto c = scalar_ctx(50, 0, 100);
    const auto v = parse_scalar(oracle_reply(c, 5.0, rng), 0, 100);
    ASSERT_TRUE(v.has_value());
    err += std::abs(*v - 50);
  }
  EXPECT_NEAR(err / n, 5.0 * std::sqrt(2.0 / M_PI), 0.1);
  auto edge = scalar_ctx(99, 1, 100);
  for (int i = 0; i < 200; ++i) {
    const auto v = parse_scalar(oracle_reply(edge, 10.0, rng), 1, 100);
    ASSERT_TRUE(v.has_value());
  }
}

TEST(Oracle, BackendNeedsContextAndIsSeeded) {
  OracleBackend a(3.0, 77), b(3.0, 77);
  const std::vector<ChatTurn> turns{{Role::user, "q"}};
  EXPECT_THROW(a.send(turns, nullptr), GatewayError);
  auto c = scalar_ctx(40);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.send(turns, &c), b.send(turns, &c));
  auto free = c;
  free.kind = QuestionKind::free_text;
  EXPECT_FALSE(parse_scalar(a.send(turns, &free), 0, 100).has_value());
}

TEST(Oracle, LearnerOnlyUsesImmediateNegativeFeedback) {
  FeedbackLearnerBackend learner;
  auto c = binary_ctx(30, 70);
  std::vector<ChatTurn> cold{{Role::system, "s"}, {Role::user, "q"}};
  EXPECT_EQ(learner.send(cold, &c), "lower");
  std::vector<ChatTurn> told{{Role::user, "q1"}, {Role::assistant, "x"},
                             {Role::feedback, "Your previous answer was incorrect."}, {Role::user, "q2"}};
  EXPECT_EQ(learner.send(told, &c), "higher");
  told[2].content = "Your previous answer was correct.";
  EXPECT_EQ(learner.send(told, &c), "lower");
}
