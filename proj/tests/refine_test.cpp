#include <gtest/gtest.h>

#include "ccfg/refine.hpp"
#include "support/fixtures.hpp"

using namespace ccfg;

namespace {

Oracle scripted(std::vector<std::string> files) {
  std::vector<std::string> docs;
  for (const auto& f : files) docs.push_back(fixtures::read(fixtures::data(f)));
  return [docs](const std::string& request) {
    const auto it = json::parse(request).at("iteration").get<std::size_t>();
    return docs[std::min(it, docs.size()) - 1];
  };
}

}  // namespace

TEST(BuildRequest, FirstIteration) {
  const auto r = build_request("spec", std::nullopt, nullptr, 1);
  EXPECT_TRUE(r.feedback.empty());
  EXPECT_FALSE(r.previous_grammar);
  const auto j = json::parse(serialize_request(r));
  EXPECT_FALSE(j.contains("previous_grammar"));
  EXPECT_EQ(j["iteration"], 1);
}

TEST(BuildRequest, CarriesFeedback) {
  const auto report = validate_document(fixtures::read(fixtures::data("refine/array_attempt2.json")));
  const auto r = build_request("spec", json::object(), &report, 2);
  ASSERT_EQ(r.feedback.size(), 1u);
  EXPECT_NE(r.feedback[0].find("too many nodes found"), std::string::npos);
  EXPECT_EQ(serialize_request(r), serialize_request(build_request("spec", json::object(), &report, 2)));
}

TEST(BuildRequest, CapsFeedback) {
  WellFormednessReport many;
  for (int i = 0; i < 30; ++i) many.add(Category::InvalidNonterminal, "x", Location::production(i));
  EXPECT_EQ(build_request("s", std::nullopt, &many, 3).feedback.size(), kMaxFeedbackLines);
  EXPECT_THROW(build_request("s", std::nullopt, nullptr, 0), Error);
}

TEST(Refine, NullOracleExhausts) {
  std::size_t calls = 0;
  const std::string null_doc = fixtures::read(fixtures::data("refine/null.json"));
  const auto trace = refine("spec", [&](const std::string&) {
    ++calls;
    return null_doc;
  });
  EXPECT_EQ(calls, 5u);
  EXPECT_EQ(trace.attempts.size(), 5u);
  EXPECT_EQ(trace.outcome, RefineOutcome::Exhausted);
  EXPECT_NE(trace.attempts[4].request.feedback.front().find("NullGrammar"), std::string::npos);
}

TEST(Refine, ThreeStepRecovery) {
  RefineOptions opt;
  opt.truth = fixtures::grammar("array");
  const auto trace = refine("spec", scripted({"refine/array_attempt1.json", "refine/array_attempt2.json",
                                              "refine/array_attempt3.json"}),
                            opt);
  ASSERT_EQ(trace.attempts.size(), 3u);
  EXPECT_EQ(trace.outcome, RefineOutcome::WellFormed);
  EXPECT_TRUE(trace.attempts[0].request.feedback.empty());
  EXPECT_NE(trace.attempts[1].feedback.at(0).find("too many nodes found"), std::string::npos);
  EXPECT_EQ(trace.attempts[2].request.feedback, trace.attempts[1].feedback);
  ASSERT_TRUE(trace.attempts[2].reward);
  EXPECT_EQ(trace.attempts[2].reward->total, 1.0);
}

TEST(Refine, FirstTrySucceeds) {
  const auto trace = refine("spec", scripted({"grammars/pair.grammar.json"}));
  ASSERT_EQ(trace.attempts.size(), 1u);
  EXPECT_EQ(trace.outcome, RefineOutcome::WellFormed);
  EXPECT_TRUE(trace.attempts[0].request.feedback.empty());
}

TEST(Refine, ProtocolError) {
  try {
    refine("spec", [](const std::string&) { return std::string("{oops"); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OracleProtocolError);
  }
}

TEST(Refine, ReplayReproducesReports) {
  const auto first = refine("spec", scripted({"refine/array_attempt1.json", "refine/array_attempt2.json",
                                              "refine/array_attempt3.json"}));
  const auto recorded = trace_to_json(first);
  const auto again = refine("spec", replay_oracle(json::parse(recorded.dump())));
  EXPECT_EQ(trace_to_json(again), recorded);
}

TEST(Refine, CommandOracle) {
  const auto oracle = command_oracle({CCFG_REPLAY_ORACLE, fixtures::data("grammars/pair.grammar.json")});
  const auto trace = refine("spec", oracle);
  EXPECT_EQ(trace.outcome, RefineOutcome::WellFormed);
  try {
    command_oracle({"/nonexistent/oracle"})("{}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OracleSpawnError);
  }
  try {
    command_oracle({"sh", "-c", "exit 4"})("{}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OracleProtocolError);
  }
}
