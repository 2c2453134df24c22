#pragma once

// Per-problem evaluation: sample a suite from a candidate grammar, check it
// against the truth grammar, run the solutions on it, and score everything.

#include <optional>
#include <string>
#include <vector>

#include "ccfg/harness.hpp"
#include "ccfg/metrics.hpp"
#include "ccfg/recognizer.hpp"
#include "ccfg/sampler.hpp"

namespace ccfg {

struct ProblemRun {
  ProblemScores scores;
  std::vector<std::string> tests;
  EffectivenessInput outcomes;
};

struct BenchOptions {
  std::size_t k = kEvaluationSamples;
  std::uint64_t seed = 0;
  ScoreOptions score;
  HarnessOptions harness;
};

/// Generated suite for a problem: k cases from `candidate`, each flagged
/// valid when the truth grammar accepts it.
inline std::pair<std::vector<std::string>, std::vector<bool>> generate_suite(const Grammar& candidate,
                                                                             const Grammar& truth, std::size_t k,
                                                                             std::uint64_t seed,
                                                                             const ScoreOptions& opt = {}) {
  std::vector<std::string> tests;
  for (auto& tc : Sampler(candidate, opt.limits).sample_set(k, split_seed(seed, 0x7375697465ULL)))
    tests.push_back(std::move(tc.bytes));
  const Recognizer truth_parser(truth, opt.parse);
  std::vector<bool> valid;
  for (const auto& t : tests) valid.push_back(truth_parser.parse(t).accepted);
  return {std::move(tests), std::move(valid)};
}

/// Effectiveness needs at least one correct and one incorrect solution; a
/// problem without them is scored on validity and generality only.
inline ProblemRun evaluate_problem(const Problem& problem, const std::string& candidate_doc,
                                   const BenchOptions& opt = {}) {
  if (!problem.truth_grammar) throw Error(ErrorKind::InvalidArgument, "problem '" + problem.name + "' has no grammar");
  ProblemRun run;
  run.scores.name = problem.name;
  const ScoreCard card = score_document(candidate_doc, *problem.truth_grammar, opt.k, opt.seed, opt.score);
  run.scores.validity = {card.validity.value(), static_cast<double>(card.validity.set_value())};
  run.scores.generality = {card.generality.value(), static_cast<double>(card.generality.set_value())};
  run.scores.inconclusive = card.validity.inconclusive + card.generality.inconclusive;
  if (!card.well_formed || problem.correct_solutions.empty() || problem.incorrect_solutions.empty()) return run;

  std::vector<bool> valid;
  try {
    const Grammar candidate = parse_grammar_document(candidate_doc);
    std::tie(run.tests, valid) = generate_suite(candidate, *problem.truth_grammar, opt.k, opt.seed, opt.score);
  } catch (const Error&) {
    return run;  // candidate cannot produce a suite: effectiveness 0
  }
  run.outcomes = evaluate_solutions(run.tests, valid, problem.correct_solutions.front(),
                                    problem.incorrect_solutions, opt.harness);
  run.scores.effectiveness = {element_effectiveness(run.outcomes), set_effectiveness(run.outcomes)};
  return run;
}

}  // namespace ccfg
