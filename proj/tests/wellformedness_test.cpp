#include <gtest/gtest.h>

#include "ccfg/wellformedness.hpp"
#include "support/fixtures.hpp"

using namespace ccfg;

namespace {

WellFormednessReport check_file(const std::string& rel) { return validate_document(fixtures::read(fixtures::data(rel))); }

bool has(const WellFormednessReport& r, Category c) {
  for (const auto& e : r.errors)
    if (e.category == c) return true;
  return false;
}

}  // namespace

TEST(Validate, GoldenGrammarsAreWellFormed) {
  for (const char* name : {"1369c", "1419a", "453e", "array", "grid", "pair", "queries", "sum", "word", "t_1", "t_2"}) {
    SCOPED_TRACE(name);
    const auto r = validate(fixtures::grammar(name));
    EXPECT_TRUE(r.well_formed) << (r.errors.empty() ? "" : r.errors.front().message);
  }
}

TEST(Validate, OneFixturePerCategory) {
  const std::vector<std::pair<std::string, Category>> cases{
      {"invalid/null_grammar.json", Category::NullGrammar},
      {"invalid/unbracketed_counter.json", Category::UnbracketedCounterVariable},
      {"invalid/missing_reference.json", Category::MissingVariableReference},
      {"invalid/node_overflow.json", Category::NodeOverflow},
      {"invalid/invalid_nonterminal.json", Category::InvalidNonterminal},
  };
  for (const auto& [file, cat] : cases) {
    SCOPED_TRACE(file);
    const auto r = check_file(file);
    EXPECT_FALSE(r.well_formed);
    ASSERT_EQ(r.errors.size(), 1u) << feedback_text(r).front();
    EXPECT_EQ(r.errors[0].category, cat);
  }
}

TEST(Validate, CaseStudyCounterExpression) {
  const auto r = check_file("invalid/counter_expr.json");
  EXPECT_FALSE(r.well_formed);
  EXPECT_TRUE(has(r, Category::UnbracketedCounterVariable));
  EXPECT_NE(feedback_text(r).front().find("Counter operator parse failed"), std::string::npos);
}

TEST(Validate, UnboundSubscript) {
  const auto g = fixtures::inline_grammar({"<S> -> <T_t>", "<T_i> -> <T_i-1> <s> a_i", "<T_1> -> a_1"},
                                          {"1 <= a_i <= 3"});
  const auto r = validate(g);
  EXPECT_TRUE(has(r, Category::UnbracketedCounterVariable));
}

TEST(Validate, NoConstraints) {
  const auto g = fixtures::inline_grammar({"<S> -> [n] <n> <L_n>", "<L_i> -> <L_i-1> <s> a_i", "<L_1> -> a_1"}, {});
  const auto r = validate(g);
  EXPECT_FALSE(r.well_formed);
  EXPECT_TRUE(has(r, Category::MissingVariableReference));
}

TEST(Validate, ConstraintOnUnusedName) {
  const auto g = fixtures::inline_grammar({"<S> -> [n]"}, {"1 <= n <= 3", "1 <= q <= 3"});
  const auto r = validate(g);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].category, Category::MissingVariableReference);
  EXPECT_EQ(r.errors[0].location, Location::constraint(1));
}

TEST(Validate, UndefinedNonterminal) {
  const auto r = validate(fixtures::inline_grammar({"<S> -> <A>"}, {}));
  EXPECT_TRUE(has(r, Category::InvalidNonterminal));
}

TEST(Validate, MissingStart) {
  const auto r = validate(fixtures::inline_grammar({"<A> -> x"}, {"1 <= x <= 2"}));
  EXPECT_TRUE(has(r, Category::NullGrammar));
}

TEST(Validate, RefinementAttempts) {
  const auto first = check_file("refine/array_attempt1.json");
  EXPECT_FALSE(first.well_formed);
  const auto second = check_file("refine/array_attempt2.json");
  ASSERT_EQ(second.errors.size(), 1u);
  EXPECT_EQ(second.errors[0].category, Category::NodeOverflow);
  EXPECT_TRUE(check_file("refine/array_attempt3.json").well_formed);
}

TEST(Validate, BaseIndexLint) {
  const auto r = validate(fixtures::grammar("array"));
  EXPECT_TRUE(r.well_formed);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("read as 1"), std::string::npos);
}

TEST(Feedback, NodeOverflowText) {
  const auto lines = feedback_text(check_file("invalid/node_overflow.json"));
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].rfind("NodeOverflow: ", 0), 0u);
  EXPECT_NE(lines[0].find("too many nodes found, not valid grammar"), std::string::npos);
}

TEST(Feedback, EmptyReport) { EXPECT_TRUE(feedback_text(WellFormednessReport{}).empty()); }

TEST(Feedback, StableOrdering) {
  WellFormednessReport r;
  r.add(Category::NodeOverflow, "late", Location::global());
  r.add(Category::MissingVariableReference, "b", Location::production(1));
  r.add(Category::InvalidNonterminal, "c", Location::production(1));
  r.add(Category::UnbracketedCounterVariable, "a", Location::production(1));
  r.add(Category::InvalidNonterminal, "d", Location::production(0));
  const std::vector<std::string> want{"InvalidNonterminal: d", "UnbracketedCounterVariable: a",
                                      "MissingVariableReference: b", "InvalidNonterminal: c", "NodeOverflow: late"};
  EXPECT_EQ(feedback_text(r), want);
  EXPECT_EQ(feedback_text(r), feedback_text(r));
}

TEST(Feedback, TwoErrorsOneProduction) {
  const auto g = fixtures::inline_grammar({"<S> -> <A> <T_q> z"}, {});
  const auto r = validate(g);
  const auto lines = feedback_text(r);
  ASSERT_GE(lines.size(), 2u);
  EXPECT_EQ(lines, feedback_text(validate(g)));
}

TEST(Report, Json) {
  const auto j = report_to_json(check_file("invalid/node_overflow.json"));
  EXPECT_FALSE(j["well_formed"].get<bool>());
  EXPECT_EQ(j["errors"][0]["category"], "NodeOverflow");
  EXPECT_EQ(j["errors"][0]["location"], "global");
}
