#pragma once

// Bounded grammar-refinement loop around an external grammar oracle.
//
// Each iteration sends one request document to the oracle and reads back a
// grammar container. The loop stops at the first well-formed grammar or after
// max_iterations calls. Validator errors go back to the oracle as feedback
// lines; the driver itself never edits a grammar.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccfg/document.hpp"
#include "ccfg/error.hpp"
#include "ccfg/harness.hpp"
#include "ccfg/metrics.hpp"
#include "ccfg/wellformedness.hpp"

namespace ccfg {

inline constexpr std::size_t kMaxRefineIterations = 5;
inline constexpr std::size_t kMaxFeedbackLines = 20;

struct OracleRequest {
  std::string specification;
  std::optional<json> previous_grammar;
  std::vector<std::string> feedback;
  std::size_t iteration = 1;
};

inline json request_to_json(const OracleRequest& r) {
  json j{{"specification", r.specification}, {"feedback", r.feedback}, {"iteration", r.iteration}};
  if (r.previous_grammar) j["previous_grammar"] = *r.previous_grammar;
  return j;
}

inline std::string serialize_request(const OracleRequest& r) { return request_to_json(r).dump() + "\n"; }

inline OracleRequest build_request(const std::string& specification, const std::optional<json>& previous,
                                   const WellFormednessReport* report, std::size_t iteration) {
  if (iteration < 1) throw Error(ErrorKind::InvalidArgument, "iteration numbers start at 1");
  OracleRequest r;
  r.specification = specification;
  r.previous_grammar = previous;
  r.iteration = iteration;
  if (report) {
    r.feedback = feedback_text(*report);
    if (r.feedback.size() > kMaxFeedbackLines) r.feedback.resize(kMaxFeedbackLines);
  }
  return r;
}

/// request document in, grammar container document out
using Oracle = std::function<std::string(const std::string&)>;

/// An oracle backed by an external program: request on stdin, grammar on stdout.
inline Oracle command_oracle(Command argv, std::chrono::milliseconds timeout = std::chrono::minutes(5)) {
  return [argv = std::move(argv), timeout](const std::string& request) {
    const RunOutcome run = run_solution(argv, request, timeout);
    switch (run.status) {
      case RunStatus::Ok: return run.stdout_bytes;
      case RunStatus::SpawnError: throw Error(ErrorKind::OracleSpawnError, "cannot start oracle '" + argv.front() + "'");
      case RunStatus::Timeout: throw Error(ErrorKind::OracleProtocolError, "oracle timed out");
      case RunStatus::NonzeroExit: break;
    }
    throw Error(ErrorKind::OracleProtocolError, "oracle exited with status " + std::to_string(run.exit_code));
  };
}

struct RefineAttempt {
  OracleRequest request;
  json grammar;
  WellFormednessReport report;
  std::vector<std::string> feedback;
  std::optional<Reward> reward;
};

enum class RefineOutcome { WellFormed, Exhausted };

struct RefinementTrace {
  std::vector<RefineAttempt> attempts;
  RefineOutcome outcome = RefineOutcome::Exhausted;
};

struct RefineOptions {
  std::size_t max_iterations = kMaxRefineIterations;
  ValidateOptions validate;
  std::optional<Grammar> truth;
  std::size_t reward_samples = kRewardSamples;
  std::uint64_t seed = 0;
};

inline RefinementTrace refine(const std::string& specification, const Oracle& oracle, const RefineOptions& opt = {}) {
  if (opt.max_iterations == 0) throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
  RefinementTrace trace;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    const RefineAttempt* last = trace.attempts.empty() ? nullptr : &trace.attempts.back();
    RefineAttempt attempt;
    attempt.request = build_request(specification, last ? std::optional<json>(last->grammar) : std::nullopt,
                                    last ? &last->report : nullptr, it);
    const std::string response = oracle(serialize_request(attempt.request));
    attempt.grammar = json::parse(response, nullptr, /*allow_exceptions=*/false);
    if (attempt.grammar.is_discarded())
      throw Error(ErrorKind::OracleProtocolError, "iteration " + std::to_string(it) + ": response is not a JSON document");
    ValidateOptions v = opt.validate;
    v.seed = split_seed(opt.seed, it);
    attempt.report = validate_document(response, v);
    attempt.feedback = feedback_text(attempt.report);
    const bool done = attempt.report.well_formed;
    if (done && opt.truth) attempt.reward = reward_document(response, *opt.truth, opt.reward_samples, opt.seed);
    trace.attempts.push_back(std::move(attempt));
    if (done) {
      trace.outcome = RefineOutcome::WellFormed;
      return trace;
    }
  }
  trace.outcome = RefineOutcome::Exhausted;
  return trace;
}

inline json trace_to_json(const RefinementTrace& t) {
  json attempts = json::array();
  for (const auto& a : t.attempts) {
    json j{{"iteration", a.request.iteration},
           {"request", request_to_json(a.request)},
           {"grammar", a.grammar},
           {"report", report_to_json(a.report)},
           {"feedback", a.feedback}};
    if (a.reward) j["reward"] = {{"r_v", a.reward->r_v}, {"r_g", a.reward->r_g}, {"total", a.reward->total}};
    attempts.push_back(std::move(j));
  }
  return json{{"attempts", std::move(attempts)},
              {"outcome", t.outcome == RefineOutcome::WellFormed ? "well_formed" : "exhausted"}};
}

/// Oracle that answers iteration i with the grammar recorded in attempt i of
/// a serialized trace (the last one once the recording runs out).
inline Oracle replay_oracle(const json& trace) {
  std::vector<std::string> responses;
  for (const auto& a : trace.at("attempts")) responses.push_back(a.at("grammar").dump());
  if (responses.empty()) throw Error(ErrorKind::InvalidArgument, "trace has no attempts");
  return [responses](const std::string& request) {
    const auto it = json::parse(request).at("iteration").get<std::size_t>();
    return responses[std::min(it, responses.size()) - 1];
  };
}

}  // namespace ccfg
