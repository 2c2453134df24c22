// ccfg: command-line front end.
//
// exit codes: 0 ok, 1 domain negative (reject, not well-formed), 2 usage or
// protocol error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ccfg/ccfg.hpp"

namespace fs = std::filesystem;
using namespace ccfg;

namespace {

struct Global {
  std::uint64_t seed = 0;
  std::string format = "human";
  std::size_t node_budget = 100'000;
  std::size_t retry_budget = 1'000;
  std::size_t step_budget = 1'000'000;

  bool document() const { return format == "document"; }

  SampleLimits limits() const {
    SampleLimits l;
    l.node_budget = node_budget;
    l.retry_budget = retry_budget;
    return l;
  }
  ParseOptions parse() const {
    ParseOptions p;
    p.step_budget = step_budget;
    return p;
  }
  ValidateOptions validate() const {
    ValidateOptions v;
    v.node_budget = node_budget;
    v.retry_budget = retry_budget;
    v.seed = seed;
    return v;
  }
  ScoreOptions score() const { return ScoreOptions{limits(), parse(), validate()}; }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::UnreadablePath, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

int cmd_validate(const Global& g, const std::string& path) {
  const auto report = validate_document(slurp(path), g.validate());
  if (g.document()) {
    emit(report_to_json(report));
  } else {
    std::cout << (report.well_formed ? "well-formed" : "not well-formed") << "\n";
    for (const auto& line : feedback_text(report)) std::cout << "  " << line << "\n";
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  }
  return report.well_formed ? 0 : 1;
}

int cmd_sample(const Global& g, const std::string& path, std::size_t k, const std::string& outdir,
               const std::string& separator) {
  const Sampler sampler(parse_grammar_document(slurp(path)), g.limits(), fs::path(path).filename().string());
  const auto cases = sampler.sample_set(k, g.seed);
  if (!outdir.empty()) {
    fs::create_directories(outdir);
    for (std::size_t j = 0; j < cases.size(); ++j) {
      std::ofstream out(fs::path(outdir) / ("tc_" + std::to_string(j) + ".txt"), std::ios::binary);
      out << cases[j].bytes;
    }
  }
  if (g.document()) {
    json arr = json::array();
    for (const auto& tc : cases) arr.push_back({{"bytes", tc.bytes}, {"seed", tc.seed}, {"attempts", tc.attempts}});
    emit(json{{"grammar", fs::path(path).filename().string()},
              {"seed", g.seed},
              {"test_cases", std::move(arr)}});
  } else if (outdir.empty()) {
    for (std::size_t j = 0; j < cases.size(); ++j) {
      if (j) std::cout << separator;
      std::cout << cases[j].bytes;
    }
    std::cout << "\n";
  } else {
    std::cerr << "wrote " << cases.size() << " test cases to " << outdir << "\n";
  }
  return 0;
}

int cmd_check(const Global& g, const std::string& grammar, const std::string& test, bool tolerate) {
  ParseOptions p = g.parse();
  p.tolerate_trailing_newline = tolerate;
  const auto res = parse_test_case(parse_grammar_document(slurp(grammar)), slurp(test), p);
  if (g.document()) {
    emit(json{{"accepted", res.accepted},
              {"inconclusive", res.inconclusive},
              {"reason", res.reason},
              {"position", res.position},
              {"steps", res.steps_used}});
  } else if (res.accepted) {
    std::cout << "accept\n";
  } else {
    std::cout << (res.inconclusive ? "inconclusive" : "reject") << ": " << res.reason << " (byte " << res.position
              << ")\n";
  }
  if (res.inconclusive) return 2;
  return res.accepted ? 0 : 1;
}

int cmd_score(const Global& g, const std::string& cand, const std::string& truth, std::size_t k) {
  const auto card = score_document(slurp(cand), parse_grammar_document(slurp(truth)), k, g.seed, g.score());
  if (g.document()) {
    emit(json{{"well_formed", card.well_formed},
              {"k", k},
              {"seed", g.seed},
              {"validity", {{"elt", card.validity.value()}, {"set", card.validity.set_value()}}},
              {"generality", {{"elt", card.generality.value()}, {"set", card.generality.set_value()}}},
              {"inconclusive_parses", card.validity.inconclusive + card.generality.inconclusive},
              {"report", report_to_json(card.report)}});
  } else {
    std::cout << "element validity   " << fixed(card.validity.value()) << "\n"
              << "set validity       " << card.validity.set_value() << "\n"
              << "element generality " << fixed(card.generality.value()) << "\n"
              << "set generality     " << card.generality.set_value() << "\n";
    if (!card.well_formed)
      for (const auto& line : feedback_text(card.report)) std::cout << "  " << line << "\n";
  }
  return card.well_formed ? 0 : 1;
}

int cmd_reward(const Global& g, const std::string& cand, const std::string& truth, std::size_t k) {
  const auto r = reward_document(slurp(cand), parse_grammar_document(slurp(truth)), k, g.seed, g.score());
  if (g.document())
    emit(json{{"r_v", r.r_v}, {"r_g", r.r_g}, {"total", r.total}, {"well_formed", r.well_formed}});
  else
    std::cout << "total " << fixed(r.total) << " (r_v " << fixed(r.r_v) << ", r_g " << fixed(r.r_g) << ")\n";
  return 0;
}

json run_json(const ProblemRun& run) {
  const auto& s = run.scores;
  auto pair = [](const ScorePair& p) { return json{{"elt", p.element}, {"set", p.set}}; };
  return json{{"problem", s.name},
              {"validity", pair(s.validity)},
              {"effectiveness", pair(s.effectiveness)},
              {"generality", pair(s.generality)},
              {"inconclusive_parses", s.inconclusive}};
}

int cmd_effectiveness(const Global& g, const std::string& corpus_path, const std::string& name,
                      const std::string& grammar, std::size_t k, std::size_t workers, std::int64_t timeout_ms) {
  const auto corpus = load_corpus(corpus_path);
  const Problem* p = corpus.find(name);
  if (!p) throw Error(ErrorKind::InvalidArgument, "no problem named '" + name + "'");
  if (p->correct_solutions.empty() || p->incorrect_solutions.empty())
    throw Error(ErrorKind::EmptySolutionSet, "problem '" + name + "' needs correct and incorrect solutions");
  BenchOptions opt{k, g.seed, g.score(), HarnessOptions{std::chrono::milliseconds(timeout_ms), workers}};
  const auto run = evaluate_problem(*p, slurp(grammar), opt);
  if (g.document()) {
    emit(run_json(run));
  } else {
    std::cout << "element effectiveness " << fixed(run.scores.effectiveness.element) << "\n"
              << "set effectiveness     " << fixed(run.scores.effectiveness.set) << "\n";
  }
  return 0;
}

int cmd_mutate(const Global& g, const std::string& path, double rate) {
  std::cout << mutate_test_case(slurp(path), rate, g.seed);
  return 0;
}

int cmd_refine(const Global& g, const std::string& spec, const std::string& oracle_cmd, std::size_t iters,
               const std::string& truth) {
  RefineOptions opt;
  opt.max_iterations = iters;
  opt.validate = g.validate();
  opt.seed = g.seed;
  if (!truth.empty()) opt.truth = parse_grammar_document(slurp(truth));
  const auto trace = refine(slurp(spec), command_oracle({"/bin/sh", "-c", oracle_cmd}), opt);
  if (g.document()) {
    emit(trace_to_json(trace));
  } else {
    for (const auto& a : trace.attempts) {
      std::cout << "attempt " << a.request.iteration << ": "
                << (a.report.well_formed ? "well-formed" : "not well-formed") << "\n";
      for (const auto& line : a.feedback) std::cout << "  " << line << "\n";
      if (a.reward) std::cout << "  reward " << fixed(a.reward->total) << "\n";
    }
    std::cout << (trace.outcome == RefineOutcome::WellFormed ? "outcome well_formed" : "outcome exhausted") << "\n";
  }
  return trace.outcome == RefineOutcome::WellFormed ? 0 : 1;
}

int cmd_bench(const Global& g, const std::string& corpus_path, const std::string& dir, std::size_t k,
              std::size_t workers, std::int64_t timeout_ms) {
  const auto corpus = load_corpus(corpus_path);
  for (const auto& s : corpus.skipped) std::cerr << "skip: " << s << "\n";
  BenchOptions opt{k, g.seed, g.score(), HarnessOptions{std::chrono::milliseconds(timeout_ms), workers}};
  std::vector<ProblemScores> rows;
  json per = json::array();
  for (const auto& p : corpus.problems) {
    if (!p.truth_grammar) continue;
    const fs::path cand = fs::path(dir) / (p.name + ".json");
    if (!fs::exists(cand)) {
      std::cerr << "skip: no candidate grammar for '" << p.name << "'\n";
      continue;
    }
    // each problem gets its own seed so adding a problem does not shift the others
    BenchOptions o = opt;
    o.seed = split_seed(g.seed, fnv1a(p.name));
    const auto run = evaluate_problem(p, slurp(cand.string()), o);
    rows.push_back(run.scores);
    per.push_back(run_json(run));
  }
  const auto summary = aggregate(rows);
  if (g.document()) {
    json j = summary_to_json(summary);
    j["per_problem"] = std::move(per);
    emit(j);
  } else {
    auto line = [](const char* label, const ScorePair& p) {
      std::cout << label << fixed(p.element, 2) << "  " << fixed(p.set, 2) << "\n";
    };
    std::cout << "problems       " << summary.problems << "\n"
              << "               elt     set\n";
    line("validity       ", summary.validity);
    line("effectiveness  ", summary.effectiveness);
    line("generality     ", summary.generality);
    std::cout << "inconclusive   " << summary.inconclusive << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CCFG grammar engine and evaluation toolkit"};
  app.require_subcommand(1);
  Global g;
  if (const char* env = std::getenv("CCFG_SEED")) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "CCFG_SEED is not an unsigned integer\n";
      return 2;
    }
  }
  app.add_option("--seed", g.seed, "random seed (default: $CCFG_SEED or 0)");
  app.add_option("--format", g.format, "human | document")->check(CLI::IsMember({"human", "document"}));
  app.add_option("--node-budget", g.node_budget)->check(CLI::PositiveNumber);
  app.add_option("--retry-budget", g.retry_budget)->check(CLI::PositiveNumber);
  app.add_option("--step-budget", g.step_budget)->check(CLI::PositiveNumber);
  app.fallthrough();

  std::string grammar, test, candidate, truth, corpus, problem, outdir, spec, oracle, dir;
  std::string separator = "\n";
  std::size_t k = 0, iters = kMaxRefineIterations, workers = 0;
  double rate = kMutationRate;
  bool tolerate = false;
  std::int64_t timeout_ms = kDefaultTimeout.count();
  std::function<int()> action;

  auto* validate_cmd = app.add_subcommand("validate", "check a grammar for well-formedness");
  validate_cmd->add_option("grammar", grammar)->required();
  validate_cmd->callback([&] { action = [&] { return cmd_validate(g, grammar); }; });

  auto* sample_cmd = app.add_subcommand("sample", "draw test cases from a grammar");
  sample_cmd->add_option("grammar", grammar)->required();
  sample_cmd->add_option("-k", k, "number of test cases")->default_val(1)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--outdir", outdir, "write tc_<j>.txt files here");
  sample_cmd->add_option("--separator", separator, "printed between test cases");
  sample_cmd->callback([&] { action = [&] { return cmd_sample(g, grammar, k, outdir, separator); }; });

  auto* check_cmd = app.add_subcommand("check", "test whether a test case belongs to a grammar");
  check_cmd->add_option("grammar", grammar)->required();
  check_cmd->add_option("testfile", test)->required();
  check_cmd->add_flag("--tolerate-trailing-newline", tolerate);
  check_cmd->callback([&] { action = [&] { return cmd_check(g, grammar, test, tolerate); }; });

  auto* score_cmd = app.add_subcommand("score", "validity and generality of a candidate grammar");
  score_cmd->add_option("--candidate", candidate)->required();
  score_cmd->add_option("--truth", truth)->required();
  score_cmd->add_option("-k", k)->default_val(kEvaluationSamples)->check(CLI::PositiveNumber);
  score_cmd->callback([&] { action = [&] { return cmd_score(g, candidate, truth, k); }; });

  auto* reward_cmd = app.add_subcommand("reward", "validity x generality reward");
  reward_cmd->add_option("--candidate", candidate)->required();
  reward_cmd->add_option("--truth", truth)->required();
  reward_cmd->add_option("-k", k)->default_val(kRewardSamples)->check(CLI::PositiveNumber);
  reward_cmd->callback([&] { action = [&] { return cmd_reward(g, candidate, truth, k); }; });

  auto* eff_cmd = app.add_subcommand("effectiveness", "run solutions on a generated suite");
  eff_cmd->add_option("--corpus", corpus)->required();
  eff_cmd->add_option("--problem", problem)->required();
  eff_cmd->add_option("--grammar", grammar)->required();
  eff_cmd->add_option("-k", k)->default_val(kEvaluationSamples)->check(CLI::PositiveNumber);
  eff_cmd->add_option("--workers", workers);
  eff_cmd->add_option("--timeout-ms", timeout_ms)->check(CLI::PositiveNumber);
  eff_cmd->callback(
      [&] { action = [&] { return cmd_effectiveness(g, corpus, problem, grammar, k, workers, timeout_ms); }; });

  auto* mutate_cmd = app.add_subcommand("mutate", "token-level mutation baseline");
  mutate_cmd->add_option("testfile", test)->required();
  mutate_cmd->add_option("--rate", rate)->check(CLI::Range(0.0, 1.0));
  mutate_cmd->callback([&] { action = [&] { return cmd_mutate(g, test, rate); }; });

  auto* refine_cmd = app.add_subcommand("refine", "iterate an external grammar oracle");
  refine_cmd->add_option("--spec", spec)->required();
  refine_cmd->add_option("--oracle", oracle, "shell command")->required();
  refine_cmd->add_option("--max-iters", iters)->check(CLI::PositiveNumber);
  refine_cmd->add_option("--truth", truth);
  refine_cmd->callback([&] { action = [&] { return cmd_refine(g, spec, oracle, iters, truth); }; });

  auto* bench_cmd = app.add_subcommand("bench", "corpus-level summary table");
  bench_cmd->add_option("--corpus", corpus)->required();
  bench_cmd->add_option("--grammars", dir, "directory of <problem>.json candidates")->required();
  bench_cmd->add_option("-k", k)->default_val(kEvaluationSamples)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--workers", workers);
  bench_cmd->add_option("--timeout-ms", timeout_ms)->check(CLI::PositiveNumber);
  bench_cmd->callback([&] { action = [&] { return cmd_bench(g, corpus, dir, k, workers, timeout_ms); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::RetriesExhausted:
      case ErrorKind::NodeBudgetExceeded:
      case ErrorKind::OutputBudgetExceeded:
      case ErrorKind::UnboundCounter:
      case ErrorKind::UndefinedNonterminal:
      case ErrorKind::TruthNotWellFormed:
        return 1;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
