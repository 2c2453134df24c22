#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ccfg/document.hpp"
#include "ccfg/error.hpp"
#include "ccfg/grammar.hpp"
#include "ccfg/recognizer.hpp"
#include "ccfg/sampler.hpp"
#include "ccfg/wellformedness.hpp"

namespace ccfg {

/// hits / total over one k-sample; inconclusive parses count as misses.
struct Fraction {
  std::size_t hits = 0;
  std::size_t total = 0;
  std::size_t inconclusive = 0;

  double value() const { return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total); }
  /// Sample approximation of the set-based score: 1 iff every sampled case passed.
  int set_value() const { return total > 0 && hits == total ? 1 : 0; }
};

struct ScoreOptions {
  SampleLimits limits;
  ParseOptions parse;
  ValidateOptions validate;
};

inline constexpr std::size_t kRewardSamples = 5;
inline constexpr std::size_t kEvaluationSamples = 10;

/// Validity and generality of `candidate` against `truth` from one pair of
/// k-samples; every score below is a view of this.
struct ScoreCard {
  bool well_formed = false;
  WellFormednessReport report;
  Fraction validity;
  Fraction generality;
};

namespace detail {

inline std::uint64_t validity_seed(std::uint64_t seed) { return split_seed(seed, 0x76616c6964ULL); }
inline std::uint64_t generality_seed(std::uint64_t seed) { return split_seed(seed, 0x67656e6572ULL); }

/// Fraction of `cases` accepted by `parser`.
inline Fraction acceptance(const Recognizer& parser, const std::vector<TestCase>& cases) {
  Fraction f;
  f.total = cases.size();
  for (const auto& tc : cases) {
    const auto res = parser.parse(tc.bytes);
    f.hits += res.accepted ? 1 : 0;
    f.inconclusive += res.inconclusive ? 1 : 0;
  }
  return f;
}

inline void require_truth(const Grammar& truth, const ScoreOptions& opt) {
  ValidateOptions v = opt.validate;
  const auto report = validate(truth, v);
  if (!report.well_formed) {
    const auto lines = feedback_text(report);
    throw Error(ErrorKind::TruthNotWellFormed, lines.empty() ? "ground-truth grammar" : lines.front());
  }
}

inline Fraction zero_fraction(std::size_t k) { return Fraction{0, k, 0}; }

}  // namespace detail

inline ScoreCard score(const Grammar& candidate, const Grammar& truth, std::size_t k, std::uint64_t seed,
                       const ScoreOptions& opt = {}) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  detail::require_truth(truth, opt);
  ScoreCard card;
  ValidateOptions v = opt.validate;
  v.seed = seed;
  card.report = validate(candidate, v);
  card.well_formed = card.report.well_formed;
  card.validity = detail::zero_fraction(k);
  card.generality = detail::zero_fraction(k);
  if (!card.well_formed) return card;

  const Recognizer truth_parser(truth, opt.parse);
  const Recognizer candidate_parser(candidate, opt.parse);
  try {
    const auto from_candidate = Sampler(candidate, opt.limits).sample_set(k, detail::validity_seed(seed));
    card.validity = detail::acceptance(truth_parser, from_candidate);
  } catch (const Error&) {
    // candidate cannot produce k cases: validity stays 0
  }
  const auto from_truth = Sampler(truth, opt.limits).sample_set(k, detail::generality_seed(seed));
  card.generality = detail::acceptance(candidate_parser, from_truth);
  return card;
}

/// Scores a candidate container document; a document that does not parse
/// scores like any other ill-formed grammar.
inline ScoreCard score_document(std::string_view candidate_doc, const Grammar& truth, std::size_t k,
                                std::uint64_t seed, const ScoreOptions& opt = {}) {
  auto parsed = parse_grammar_document_lenient(candidate_doc);
  if (parsed.ok()) return score(parsed.grammar, truth, k, seed, opt);
  detail::require_truth(truth, opt);
  ScoreCard card;
  ValidateOptions v = opt.validate;
  v.seed = seed;
  card.report = validate_document(candidate_doc, v);
  card.validity = detail::zero_fraction(k);
  card.generality = detail::zero_fraction(k);
  return card;
}

inline double element_validity(const Grammar& candidate, const Grammar& truth, std::size_t k, std::uint64_t seed,
                               const ScoreOptions& opt = {}) {
  return score(candidate, truth, k, seed, opt).validity.value();
}

inline double element_generality(const Grammar& candidate, const Grammar& truth, std::size_t k, std::uint64_t seed,
                                  const ScoreOptions& opt = {}) {
  return score(candidate, truth, k, seed, opt).generality.value();
}

inline int set_validity(const Grammar& candidate, const Grammar& truth, std::size_t k, std::uint64_t seed,
                        const ScoreOptions& opt = {}) {
  return score(candidate, truth, k, seed, opt).validity.set_value();
}

inline int set_generality(const Grammar& candidate, const Grammar& truth, std::size_t k, std::uint64_t seed,
                          const ScoreOptions& opt = {}) {
  return score(candidate, truth, k, seed, opt).generality.set_value();
}

struct Reward {
  double r_v = 0.0;
  double r_g = 0.0;
  double total = 0.0;
  bool well_formed = false;
};

inline Reward reward_from(const ScoreCard& card) {
  Reward r;
  r.well_formed = card.well_formed;
  if (!card.well_formed) return r;
  r.r_v = card.validity.value();
  r.r_g = card.generality.value();
  r.total = r.r_v * r.r_g;
  return r;
}

/// Zero for an ill-formed candidate, else validity x generality.
inline Reward reward(const Grammar& candidate, const Grammar& truth, std::size_t k = kRewardSamples,
                     std::uint64_t seed = 0, const ScoreOptions& opt = {}) {
  return reward_from(score(candidate, truth, k, seed, opt));
}

inline Reward reward_document(std::string_view candidate_doc, const Grammar& truth, std::size_t k = kRewardSamples,
                              std::uint64_t seed = 0, const ScoreOptions& opt = {}) {
  return reward_from(score_document(candidate_doc, truth, k, seed, opt));
}

// ---------------------------------------------------------------------------
// Effectiveness

/// differs[y][x]: incorrect solution y's output on test x differs from the
/// reference output (crashes and timeouts count as different).
struct EffectivenessInput {
  std::vector<bool> valid;
  std::vector<std::vector<bool>> differs;
};

namespace detail {

inline bool check_effectiveness_input(const EffectivenessInput& in) {
  if (in.valid.empty()) throw Error(ErrorKind::EmptyTestSet, "no test cases");
  if (in.differs.empty()) throw Error(ErrorKind::EmptySolutionSet, "no incorrect solutions");
  for (const auto& row : in.differs)
    if (row.size() != in.valid.size())
      throw Error(ErrorKind::InvalidArgument, "outcome row length differs from test count");
  for (bool v : in.valid)
    if (!v) return false;
  return true;
}

}  // namespace detail

/// Mean over tests of the fraction of incorrect solutions each test exposes.
inline double element_effectiveness(const EffectivenessInput& in) {
  if (!detail::check_effectiveness_input(in)) return 0.0;
  double sum = 0.0;
  for (std::size_t x = 0; x < in.valid.size(); ++x) {
    std::size_t hit = 0;
    for (const auto& row : in.differs) hit += row[x] ? 1 : 0;
    sum += static_cast<double>(hit) / static_cast<double>(in.differs.size());
  }
  return sum / static_cast<double>(in.valid.size());
}

/// Fraction of incorrect solutions exposed by at least one test.
inline double set_effectiveness(const EffectivenessInput& in) {
  if (!detail::check_effectiveness_input(in)) return 0.0;
  std::size_t caught = 0;
  for (const auto& row : in.differs)
    for (bool d : row)
      if (d) {
        ++caught;
        break;
      }
  return static_cast<double>(caught) / static_cast<double>(in.differs.size());
}

// ---------------------------------------------------------------------------
// Corpus summary

struct ScorePair {
  double element = 0.0;
  double set = 0.0;
};

struct ProblemScores {
  std::string name;
  ScorePair validity;
  ScorePair effectiveness;
  ScorePair generality;
  std::size_t inconclusive = 0;
};

struct CorpusSummary {
  std::size_t problems = 0;
  ScorePair validity;  // percentages, two decimals
  ScorePair effectiveness;
  ScorePair generality;
  std::size_t inconclusive = 0;
};

inline double percent2(double mean) { return std::round(mean * 100.0 * 100.0) / 100.0; }

inline CorpusSummary aggregate(const std::vector<ProblemScores>& per_problem) {
  if (per_problem.empty()) throw Error(ErrorKind::EmptyCorpus, "nothing to aggregate");
  CorpusSummary s;
  s.problems = per_problem.size();
  ScorePair v, e, g;
  for (const auto& p : per_problem) {
    v.element += p.validity.element;
    v.set += p.validity.set;
    e.element += p.effectiveness.element;
    e.set += p.effectiveness.set;
    g.element += p.generality.element;
    g.set += p.generality.set;
    s.inconclusive += p.inconclusive;
  }
  const double n = static_cast<double>(per_problem.size());
  s.validity = {percent2(v.element / n), percent2(v.set / n)};
  s.effectiveness = {percent2(e.element / n), percent2(e.set / n)};
  s.generality = {percent2(g.element / n), percent2(g.set / n)};
  return s;
}

inline json summary_to_json(const CorpusSummary& s) {
  auto pair = [](const ScorePair& p) { return json{{"elt", p.element}, {"set", p.set}}; };
  return json{{"problems", s.problems},
              {"validity", pair(s.validity)},
              {"effectiveness", pair(s.effectiveness)},
              {"generality", pair(s.generality)},
              {"inconclusive_parses", s.inconclusive}};
}

}  // namespace ccfg
