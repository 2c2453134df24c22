#include <gtest/gtest.h>

#include "ccfg/document.hpp"
#include "ccfg/grammar.hpp"
#include "support/fixtures.hpp"

using namespace ccfg;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ParseProduction, StartRule) {
  const auto p = parse_production("<S> -> [t] <n> <T_t>");
  EXPECT_EQ(p.lhs, (Nonterminal{"S", std::nullopt}));
  ASSERT_EQ(p.rhs.size(), 3u);
  EXPECT_EQ(p.rhs[0], Symbol(CounterBinder{"t"}));
  EXPECT_EQ(p.rhs[1], Symbol(SepNewline{}));
  EXPECT_EQ(p.rhs[2], Symbol(Nonterminal{"T", SubVar{"t"}}));
}

TEST(ParseProduction, BaseCase) {
  const auto p = parse_production("<T_1> -> [n] <s> [k] <n> <L_n> <n> <Z_k>");
  EXPECT_EQ(p.lhs, (Nonterminal{"T", SubConst{1}}));
  const std::vector<Symbol> want{CounterBinder{"n"}, SepSpace{},   CounterBinder{"k"},         SepNewline{},
                                 Nonterminal{"L", SubVar{"n"}},   SepNewline{}, Nonterminal{"Z", SubVar{"k"}}};
  EXPECT_EQ(p.rhs, want);
}

TEST(ParseProduction, TemplateAndTerminals) {
  const auto p = parse_production("<L_i> -> <L_i-1> <s> a_i");
  EXPECT_EQ(p.lhs, (Nonterminal{"L", SubVar{"i"}}));
  EXPECT_EQ(p.rhs[0], Symbol(Nonterminal{"L", SubVarMinus{"i", 1}}));
  EXPECT_EQ(p.rhs[2], Symbol(VariableTerminal{"a", SubVar{"i"}}));
}

TEST(ParseProduction, CharClassAndLiteral) {
  const auto p = parse_production("<R> -> [0-9]{n} + [.#] ? x");
  const auto& cc = std::get<CharClass>(p.rhs[0]);
  EXPECT_EQ(cc.set.count(), 10u);
  EXPECT_TRUE(cc.set.test('5'));
  EXPECT_EQ(cc.repetition, Repetition(std::string("n")));
  EXPECT_EQ(p.rhs[1], Symbol(Literal{"+"}));
  const auto& dots = std::get<CharClass>(p.rhs[2]);
  EXPECT_EQ(dots.set.count(), 2u);
  EXPECT_EQ(dots.repetition, Repetition(std::int64_t{1}));
  EXPECT_EQ(p.rhs[3], Symbol(Literal{"?"}));
  EXPECT_EQ(p.rhs[4], Symbol(VariableTerminal{"x", std::nullopt}));
}

TEST(ParseProduction, BracedSubscript) {
  const auto p = parse_production("<T_{i}> -> <T_{i-1}>");
  EXPECT_EQ(p.lhs, (Nonterminal{"T", SubVar{"i"}}));
  EXPECT_EQ(p.rhs[0], Symbol(Nonterminal{"T", SubVarMinus{"i", 1}}));
}

TEST(ParseProduction, Errors) {
  EXPECT_EQ(kind_of([] { parse_production("<S> -> [0-9]{n-1}"); }), ErrorKind::CounterExprUnsupported);
  EXPECT_EQ(kind_of([] { parse_production("<A->> -> a"); }), ErrorKind::InvalidNonterminal);
  EXPECT_EQ(kind_of([] { parse_production("<S> -> <Test_case>"); }), ErrorKind::InvalidNonterminal);
  EXPECT_EQ(kind_of([] { parse_production("<S> [n]"); }), ErrorKind::MissingArrow);
  EXPECT_EQ(kind_of([] { parse_production("<S> -> [0-9]+"); }), ErrorKind::CounterExprUnsupported);
}

TEST(ParseProduction, CounterFailureMessage) {
  try {
    parse_production("<S> -> [0-9]{n-1}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("Counter operator parse failed"), std::string::npos);
  }
}

TEST(ParseConstraint, Literals) {
  const auto c = parse_constraint("1 <= n <= 10^3");
  ASSERT_EQ(c.atoms.size(), 3u);
  EXPECT_EQ(c.atoms[0], Atom(IntLiteral{1}));
  EXPECT_EQ(c.atoms[1], Atom(VarRef{"n", false}));
  EXPECT_EQ(c.atoms[2], Atom(IntLiteral{1000}));
  EXPECT_EQ(c.ops, (std::vector<CompareOp>{CompareOp::Le, CompareOp::Le}));

  EXPECT_EQ(parse_constraint("x <= 10^5").atoms[1], Atom(IntLiteral{100000}));
  EXPECT_EQ(parse_constraint("x <= 105").atoms[1], Atom(IntLiteral{105}));
  EXPECT_EQ(parse_constraint("-2*10^5 <= x").atoms[0], Atom(IntLiteral{-200000}));
  EXPECT_EQ(parse_constraint("0 <= t_i < 10^9").ops[1], CompareOp::Lt);
}

TEST(ParseConstraint, IndexedChains) {
  const auto c = parse_constraint("-1000 <= a_i <= 1000");
  EXPECT_EQ(c.atoms[1], Atom(VarRef{"a", true}));
  const auto d = parse_constraint("1 <= l_i <= r_i <= n");
  EXPECT_EQ(d.atoms[1], Atom(VarRef{"l", true}));
  EXPECT_EQ(d.atoms[2], Atom(VarRef{"r", true}));
  EXPECT_EQ(d.atoms[3], Atom(VarRef{"n", false}));
}

TEST(ParseConstraint, Errors) {
  EXPECT_EQ(kind_of([] { parse_constraint("n = 5"); }), ErrorKind::MalformedConstraint);
  EXPECT_EQ(kind_of([] { parse_constraint("n >= 5"); }), ErrorKind::MalformedConstraint);
  EXPECT_EQ(kind_of([] { parse_constraint("1 <= "); }), ErrorKind::MalformedConstraint);
  EXPECT_EQ(kind_of([] { parse_constraint("n"); }), ErrorKind::MalformedConstraint);
  EXPECT_EQ(kind_of([] { parse_constraint("1 <= n 5"); }), ErrorKind::MalformedConstraint);
  EXPECT_EQ(kind_of([] { parse_constraint("1 <= n <= 10^99"); }), ErrorKind::MalformedConstraint);
}

TEST(Document, MultiCaseGrammar) {
  const auto g = fixtures::grammar("1369c");
  EXPECT_EQ(g.productions.size(), 7u);
  EXPECT_EQ(g.constraints.size(), 5u);
}

TEST(Document, EmptyProductionsIsNullGrammar) {
  EXPECT_EQ(kind_of([] { parse_grammar_document(R"({"grammar":{"productions":[],"constraints":[]}})"); }),
            ErrorKind::NullGrammar);
  EXPECT_EQ(kind_of([] { parse_grammar_document(R"({"grammar":{"productions":[""],"constraints":[""]}})"); }),
            ErrorKind::NullGrammar);
  EXPECT_EQ(kind_of([] { parse_grammar_document("not json"); }), ErrorKind::NullGrammar);
}

TEST(Document, ReportsEveryBadEntry) {
  const auto parsed = parse_grammar_document_lenient(
      R"({"grammar":{"productions":["<S> -> <A->>","<B> -> [0-9]{n-1}"],"constraints":["n = 1"]}})");
  ASSERT_EQ(parsed.issues.size(), 3u);
  EXPECT_EQ(parsed.issues[0].location, Location::production(0));
  EXPECT_EQ(parsed.issues[1].kind, ErrorKind::CounterExprUnsupported);
  EXPECT_EQ(parsed.issues[2].location, Location::constraint(0));
}

TEST(Render, CanonicalMultiCase) {
  const auto g = fixtures::grammar("1369c");
  EXPECT_EQ(render_production(g.productions[1]), "<T_i> -> <T_i-1> <n> [n] <s> [k] <n> <L_n> <n> <Z_k>");
  EXPECT_EQ(render_constraint(g.constraints[3]), "-1000 <= a_i <= 1000");
  const auto doc = json::parse(render_grammar(g));
  EXPECT_EQ(doc["grammar"]["productions"].size(), 7u);
}

TEST(Render, EmptyConstraints) {
  Grammar g;
  g.productions.push_back(parse_production("<S> -> x"));
  const auto doc = json::parse(render_grammar(g));
  EXPECT_TRUE(doc["grammar"]["constraints"].is_array());
  EXPECT_TRUE(doc["grammar"]["constraints"].empty());
}

TEST(Render, RoundTripEveryFixture) {
  for (const char* name : {"1369c", "1419a", "453e", "array", "grid", "pair", "queries", "sum", "word"}) {
    SCOPED_TRACE(name);
    const auto g = fixtures::grammar(name);
    const auto text = render_grammar(g);
    const auto again = parse_grammar_document(text);
    EXPECT_EQ(again, g);
    EXPECT_EQ(render_grammar(again), text);
  }
}

TEST(Render, CharSetsThatLookLikeNames) {
  // [ab] would re-read as a binder named "ab"
  auto p = parse_production("<S> -> [a-b]{3} [x-z]");
  CharClass gap;
  gap.set.set('a');
  gap.set.set('c');
  p.rhs.push_back(gap);
  const auto again = parse_production(render_production(p));
  EXPECT_EQ(again, p);
  EXPECT_TRUE(std::holds_alternative<CharClass>(again.rhs[0]));
  EXPECT_TRUE(std::holds_alternative<CharClass>(again.rhs[1]));
  EXPECT_TRUE(std::holds_alternative<CharClass>(again.rhs[2]));
  EXPECT_EQ(parse_production("<S> -> [xyz]").rhs[0], Symbol(CounterBinder{"xyz"}));
}

TEST(Instantiate, Unrolls) {
  const auto t = parse_production("<T_i> -> <T_i-1> <s> a_i");
  EXPECT_EQ(instantiate(t, 3), parse_production("<T_3> -> <T_2> <s> a_3"));
  const auto r = parse_production("<R_i> -> [0-9]{i}");
  EXPECT_EQ(std::get<CharClass>(instantiate(r, 4).rhs[0]).repetition, Repetition(std::int64_t{4}));
}

TEST(Instantiate, NonPositive) {
  const auto t = parse_production("<T_i> -> <T_i-1> <s> a_i");
  EXPECT_EQ(kind_of([&] { instantiate(t, 1); }), ErrorKind::NonPositiveSubscript);
  EXPECT_EQ(kind_of([&] { instantiate(t, 0); }), ErrorKind::NonPositiveSubscript);
  EXPECT_EQ(kind_of([] { instantiate(parse_production("<S> -> x"), 2); }), ErrorKind::InvalidArgument);
}
