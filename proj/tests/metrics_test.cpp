#include <gtest/gtest.h>

#include "ccfg/metrics.hpp"
#include "support/fixtures.hpp"

using namespace ccfg;

namespace {

Grammar only_n(const char* bound) { return fixtures::inline_grammar({"<S> -> [n]"}, {bound}); }

}  // namespace

TEST(Score, IdentityIsOne) {
  const auto g = fixtures::grammar("pair");
  const auto card = score(g, g, 5, 1);
  EXPECT_EQ(card.validity.value(), 1.0);
  EXPECT_EQ(card.generality.value(), 1.0);
  EXPECT_EQ(card.validity.set_value(), 1);
  EXPECT_EQ(reward(g, g).total, 1.0);
}

TEST(Score, SupersetCandidateValidity) {
  const double v = element_validity(only_n("1 <= n <= 5"), only_n("1 <= n <= 2"), 2000, 3);
  EXPECT_NEAR(v, 0.4, 0.04);
  EXPECT_EQ(element_generality(only_n("1 <= n <= 5"), only_n("1 <= n <= 2"), 200, 3), 1.0);
}

TEST(Score, SubsetCandidateGenerality) {
  const auto cand = fixtures::grammar("t_1");
  const auto truth = fixtures::grammar("t_2");
  EXPECT_NEAR(element_generality(cand, truth, 2000, 9), 0.5, 0.04);
  EXPECT_EQ(element_validity(cand, truth, 50, 9), 1.0);
  EXPECT_EQ(set_validity(cand, truth, 50, 9), 1);
  EXPECT_EQ(set_generality(cand, truth, 50, 9), 0);
}

TEST(Score, SetMatchesElementOnSameSample) {
  const auto cand = fixtures::grammar("t_1");
  const auto truth = fixtures::grammar("t_2");
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto c = score(cand, truth, 3, seed);
    EXPECT_EQ(c.generality.set_value() == 1, c.generality.value() == 1.0);
    EXPECT_EQ(c.validity.set_value() == 1, c.validity.value() == 1.0);
  }
}

TEST(Score, IllFormedCandidateScoresZero) {
  const auto truth = fixtures::grammar("pair");
  const auto bad = fixtures::inline_grammar({"<S> -> <T_t>"}, {});
  const auto card = score(bad, truth, 5, 0);
  EXPECT_FALSE(card.well_formed);
  EXPECT_EQ(card.validity.value(), 0.0);
  EXPECT_EQ(card.generality.value(), 0.0);
  EXPECT_EQ(reward(bad, truth).total, 0.0);
  EXPECT_EQ(reward_document(R"({"grammar":{"productions":[""],"constraints":[""]}})", truth).total, 0.0);
}

TEST(Score, TruthMustBeWellFormed) {
  const auto bad = fixtures::inline_grammar({"<S> -> <T_t>"}, {});
  try {
    score(fixtures::grammar("pair"), bad, 5, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TruthNotWellFormed);
  }
}

TEST(Score, Deterministic) {
  const auto a = reward(only_n("1 <= n <= 5"), only_n("1 <= n <= 2"), 5, 77);
  const auto b = reward(only_n("1 <= n <= 5"), only_n("1 <= n <= 2"), 5, 77);
  EXPECT_EQ(a.total, b.total);
  EXPECT_GE(a.total, 0.0);
  EXPECT_LE(a.total, 1.0);
}

TEST(Effectiveness, TwoByTwo) {
  EffectivenessInput in{{true, true}, {{true, false}, {false, false}}};
  EXPECT_DOUBLE_EQ(element_effectiveness(in), 0.25);
  EXPECT_DOUBLE_EQ(set_effectiveness(in), 0.5);
}

TEST(Effectiveness, AllDiffer) {
  EffectivenessInput in{{true, true, true}, {{true, true, true}, {true, true, true}}};
  EXPECT_EQ(element_effectiveness(in), 1.0);
  EXPECT_EQ(set_effectiveness(in), 1.0);
}

TEST(Effectiveness, InvalidTestZeroes) {
  EffectivenessInput in{{true, false}, {{true, true}}};
  EXPECT_EQ(element_effectiveness(in), 0.0);
  EXPECT_EQ(set_effectiveness(in), 0.0);
}

TEST(Effectiveness, Errors) {
  EXPECT_THROW(element_effectiveness(EffectivenessInput{{}, {{}}}), Error);
  try {
    set_effectiveness(EffectivenessInput{{true}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySolutionSet);
  }
}

TEST(Aggregate, Percentages) {
  ProblemScores one{"a", {1, 1}, {1, 1}, {1, 1}, 0};
  const auto s = aggregate({one});
  EXPECT_EQ(s.validity.element, 100.0);
  EXPECT_EQ(s.generality.set, 100.0);
  ProblemScores zero{"b", {1, 0}, {0, 0}, {0, 0}, 2};
  const auto t = aggregate({one, zero});
  EXPECT_EQ(t.validity.set, 50.0);
  EXPECT_EQ(t.inconclusive, 2u);
  EXPECT_EQ(aggregate({one, zero, zero}).validity.set, 33.33);
  const auto j = summary_to_json(t);
  EXPECT_EQ(j["validity"]["set"], 50.0);
  EXPECT_THROW(aggregate({}), Error);
}
