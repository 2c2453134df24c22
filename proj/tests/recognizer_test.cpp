#include <gtest/gtest.h>

#include "ccfg/recognizer.hpp"
#include "ccfg/sampler.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace ccfg;

TEST(Recognizer, PairExamples) {
  const Recognizer r(fixtures::grammar("pair"));
  EXPECT_TRUE(r.parse("2 2").accepted);
  const auto bad = r.parse("2 1");
  EXPECT_FALSE(bad.accepted);
  EXPECT_FALSE(bad.inconclusive);
  EXPECT_FALSE(bad.reason.empty());
  EXPECT_FALSE(r.parse("2  2").accepted);
  EXPECT_FALSE(r.parse("02 2").accepted);
  EXPECT_FALSE(r.parse("2 2 ").accepted);
  EXPECT_FALSE(r.parse("").accepted);
}

TEST(Recognizer, MultiCaseHandDerivation) {
  const auto g = fixtures::grammar("1369c");
  const Recognizer r(g);
  const auto res = r.parse("1\n2 1\n5 7\n9");
  ASSERT_TRUE(res.accepted) << res.reason;
  EXPECT_EQ(res.assignment.get({"t", std::nullopt}), std::optional<std::int64_t>(1));
  EXPECT_EQ(res.assignment.get({"n", std::nullopt}), std::optional<std::int64_t>(2));
  EXPECT_EQ(res.assignment.get({"k", std::nullopt}), std::optional<std::int64_t>(1));
  EXPECT_EQ(res.assignment.get({"a", 2}), std::optional<std::int64_t>(7));
  EXPECT_EQ(res.assignment.get({"b", 1}), std::optional<std::int64_t>(9));

  EXPECT_FALSE(r.parse("1\n2 1\n5 7\n9\n").accepted);
  ParseOptions lenient;
  lenient.tolerate_trailing_newline = true;
  EXPECT_TRUE(Recognizer(g, lenient).parse("1\n2 1\n5 7\n9\n").accepted);
  EXPECT_FALSE(r.parse("1\n2 1\n5 7 8\n9").accepted);
  EXPECT_FALSE(r.parse("1\n2 1\n5 1001\n9").accepted);
}

TEST(Recognizer, MultipleCasesRebind) {
  const Recognizer r(fixtures::grammar("1369c"));
  EXPECT_TRUE(r.parse("2\n3 1\n1 2 3\n4\n1 2\n5\n6 7").accepted);
  EXPECT_FALSE(r.parse("2\n3 1\n1 2 3\n4\n1 2\n5\n6").accepted);
}

TEST(Recognizer, CharClassCounts) {
  const Recognizer r(fixtures::grammar("word"));
  EXPECT_TRUE(r.parse("3\nabc").accepted);
  EXPECT_FALSE(r.parse("3\nab").accepted);
  EXPECT_FALSE(r.parse("3\nabC").accepted);
  EXPECT_FALSE(r.parse("21\naaaaaaaaaaaaaaaaaaaaa").accepted);
}

TEST(Recognizer, BacktracksOverAlternatives) {
  const Recognizer r(fixtures::grammar("queries"));
  EXPECT_TRUE(r.parse("3\n+ 5\n?\n+ 99").accepted);
  EXPECT_FALSE(r.parse("3\n+ 5\n?\n+ 100").accepted);
  EXPECT_FALSE(r.parse("2\n?").accepted);
}

TEST(Recognizer, IntegerLexing) {
  EXPECT_EQ(detail::lex_integer("-12x", 0), (std::optional<std::pair<std::int64_t, std::size_t>>({-12, 3})));
  EXPECT_EQ(detail::lex_integer("0", 0), (std::optional<std::pair<std::int64_t, std::size_t>>({0, 1})));
  EXPECT_FALSE(detail::lex_integer("-0", 0));
  EXPECT_FALSE(detail::lex_integer("007", 0));
  EXPECT_FALSE(detail::lex_integer("99999999999999999999", 0));
  EXPECT_FALSE(detail::lex_integer("-", 0));
}

TEST(Recognizer, StepBudgetIsInconclusive) {
  ParseOptions tiny;
  tiny.step_budget = 10;
  const auto g = fixtures::grammar("array");
  const std::string input = sample_test_case(g, 3).bytes;
  const auto res = Recognizer(g, tiny).parse(input);
  EXPECT_FALSE(res.accepted);
  EXPECT_TRUE(res.inconclusive);
  EXPECT_TRUE(Recognizer(g).parse(input).accepted);
}

TEST(Recognizer, BudgetMonotone) {
  const auto g = fixtures::grammar("1369c");
  const std::string input = sample_test_case(g, 11).bytes;
  bool accepted_before = false;
  for (std::size_t budget : {10u, 100u, 1000u, 10000u, 100000u, 1000000u}) {
    ParseOptions o;
    o.step_budget = budget;
    const auto res = Recognizer(g, o).parse(input);
    EXPECT_FALSE(res.accepted && res.inconclusive);
    if (accepted_before) {
      EXPECT_TRUE(res.accepted) << budget;
    }
    accepted_before |= res.accepted;
    if (!res.accepted) {
      EXPECT_TRUE(res.inconclusive) << budget;
    }
  }
  EXPECT_TRUE(accepted_before);
}

TEST(Recognizer, AcceptsOwnSamples) {
  for (const char* name : {"1369c", "1419a", "453e", "array", "grid", "queries", "word", "pair", "sum"}) {
    SCOPED_TRACE(name);
    const auto g = fixtures::grammar(name);
    const Sampler s(g);
    const Recognizer r(g);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto tc = s.sample(seed);
      const auto res = r.parse(tc.bytes);
      ASSERT_TRUE(res.accepted) << "seed " << seed << ": " << res.reason;
    }
  }
}

TEST(Recognizer, OracleEquivalenceSmall) {
  const auto g = fixtures::inline_grammar({"<S> -> [n] <n> <L_n>", "<L_i> -> <L_i-1> <s> a_i", "<L_1> -> a_1"},
                                          {"1 <= n <= 2", "0 <= a_i <= 2"});
  const auto lang = oracle::language(g, -1, 3);
  EXPECT_EQ(lang.size(), 3u + 9u);
  const Recognizer r(g);
  for (const auto& s : lang) EXPECT_TRUE(r.parse(s).accepted) << s;
  for (const auto& s : oracle::non_members(lang, 300, 1)) EXPECT_FALSE(r.parse(s).accepted) << s;
}
