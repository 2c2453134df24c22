#pragma once

// Constrained Las Vegas sampling of test cases.
//
// The sentential form is kept as a stack of pending symbols and rewritten
// leftmost-first. Counter binders and variable terminals draw a value from
// their feasible interval under the constraints and the values bound so far;
// an empty interval (or any other dead end) restarts the whole derivation.
// A returned test case is always in the grammar's language.

#include <cstdint>
#include <string>
#include <vector>

#include "ccfg/compiled.hpp"
#include "ccfg/constraints.hpp"
#include "ccfg/error.hpp"
#include "ccfg/grammar.hpp"
#include "ccfg/random.hpp"

namespace ccfg {

struct SampleLimits {
  std::size_t node_budget = 100'000;
  std::size_t retry_budget = 1'000;
  std::size_t output_budget = std::size_t{1} << 20;
  Interval default_range = kDefaultRange;
  /// Draw interval endpoints with probability 1/4 each instead of uniformly.
  bool boundary_bias = false;
};

struct TestCase {
  std::string bytes;
  std::string grammar_id;
  std::uint64_t seed = 0;
  Assignment assignment;
  std::size_t attempts = 0;
};

inline std::string render_integer(std::int64_t v) { return std::to_string(v); }

class Sampler {
 public:
  explicit Sampler(Grammar grammar, SampleLimits limits = {}, std::string grammar_id = {})
      : compiled_(std::move(grammar)), limits_(limits), id_(std::move(grammar_id)) {
    if (limits_.node_budget == 0 || limits_.retry_budget == 0 || limits_.output_budget == 0)
      throw Error(ErrorKind::InvalidArgument, "sample limits must be positive");
  }

  const CompiledGrammar& compiled() const { return compiled_; }
  const SampleLimits& limits() const { return limits_; }

  TestCase sample(std::uint64_t seed) const {
    Rng rng(seed);
    for (std::size_t attempt = 1; attempt <= limits_.retry_budget; ++attempt) {
      Attempt run(*this, rng);
      if (run.derive()) {
        TestCase tc;
        tc.bytes = std::move(run.out);
        tc.grammar_id = id_;
        tc.seed = seed;
        tc.assignment = std::move(run.assignment);
        tc.attempts = attempt;
        return tc;
      }
    }
    throw Error(ErrorKind::RetriesExhausted,
                "no derivation satisfied the constraints within " + std::to_string(limits_.retry_budget) + " attempts");
  }

  /// k cases; case j uses seed split_seed(seed, j).
  std::vector<TestCase> sample_set(std::size_t k, std::uint64_t seed) const {
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
    std::vector<TestCase> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      try {
        out.push_back(sample(split_seed(seed, j)));
      } catch (const Error& e) {
        throw Error(e.kind(), "test case " + std::to_string(j) + ": " + e.detail());
      }
    }
    return out;
  }

 private:
  struct Item {
    const Symbol* symbol;
    std::size_t frame;
  };

  // One derivation attempt. derive() returns false on a dead end and throws
  // on budget or structural faults, which retrying cannot fix.
  struct Attempt {
    const Sampler& s;
    Rng& rng;
    std::string out;
    Assignment assignment;
    std::vector<detail::Frame> frames{detail::Frame{}};
    std::vector<Item> stack;
    Symbol start_symbol;

    Attempt(const Sampler& sampler, Rng& r) : s(sampler), rng(r), start_symbol(sampler.compiled_.start()) {}

    bool derive() {
      stack.push_back(Item{&start_symbol, 0});
      std::size_t nodes = 0;
      while (!stack.empty()) {
        const Item item = stack.back();
        stack.pop_back();
        if (++nodes > s.limits_.node_budget)
          throw Error(ErrorKind::NodeBudgetExceeded,
                      "too many nodes found: derivation exceeded " + std::to_string(s.limits_.node_budget) + " nodes");
        if (!step(item)) return false;
        if (out.size() > s.limits_.output_budget)
          throw Error(ErrorKind::OutputBudgetExceeded,
                      "output exceeded " + std::to_string(s.limits_.output_budget) + " bytes");
      }
      return !find_violation(s.compiled_.constraints(), assignment);
    }

    std::int64_t need(std::optional<std::int64_t> v, const std::string& what) {
      if (!v) throw Error(ErrorKind::UnboundCounter, "counter read before binding in '" + what + "'");
      return *v;
    }

    std::int64_t draw(Interval iv) {
      if (s.limits_.boundary_bias) {
        const double u = rng.unit();
        if (u < 0.25) return iv.lo;
        if (u < 0.5) return iv.hi;
      }
      return rng.uniform(iv.lo, iv.hi);
    }

    bool bind(VarKey key) {
      const Interval iv = feasible_interval(s.compiled_.constraints(), key, assignment, s.limits_.default_range);
      if (iv.empty()) return false;
      const std::int64_t v = draw(iv);
      assignment.set(key, v);
      out += render_integer(v);
      return true;
    }

    bool step(const Item& item) {
      const detail::Frame& frame = frames[item.frame];
      return std::visit(
          [&](const auto& sym) -> bool {
            using T = std::decay_t<decltype(sym)>;
            if constexpr (std::is_same_v<T, Nonterminal>) {
              std::optional<std::int64_t> k;
              if (sym.subscript) k = need(detail::resolve(*sym.subscript, frame, assignment), render_nonterminal(sym));
              const auto* fam = s.compiled_.family(sym.name);
              if (!fam) throw Error(ErrorKind::UndefinedNonterminal, "no production for <" + sym.name + ">");
              const auto cands = s.compiled_.candidates(*fam, k);
              if (cands.empty()) return false;
              const Production& p = s.compiled_.grammar().productions[cands[rng.index(cands.size())]];
              frames.push_back(detail::Frame{&p, k.value_or(0)});
              const std::size_t f = frames.size() - 1;
              for (auto it = p.rhs.rbegin(); it != p.rhs.rend(); ++it) stack.push_back(Item{&*it, f});
              return true;
            } else if constexpr (std::is_same_v<T, CounterBinder>) {
              return bind(VarKey{sym.name, std::nullopt});
            } else if constexpr (std::is_same_v<T, VariableTerminal>) {
              std::optional<std::int64_t> idx;
              if (sym.index) idx = need(detail::resolve(*sym.index, frame, assignment), render_symbol(sym));
              return bind(VarKey{sym.name, idx});
            } else if constexpr (std::is_same_v<T, CharClass>) {
              const std::int64_t rep = need(detail::resolve(sym.repetition, frame, assignment), render_symbol(sym));
              if (rep < 0) return false;
              if (static_cast<std::uint64_t>(rep) > s.limits_.output_budget)
                throw Error(ErrorKind::OutputBudgetExceeded, "character class repeated " + std::to_string(rep) + " times");
              std::vector<char> members;
              for (unsigned c = 0; c < 256; ++c)
                if (sym.set.test(c)) members.push_back(static_cast<char>(c));
              if (members.empty()) return rep == 0;
              for (std::int64_t r = 0; r < rep; ++r) out += members[rng.index(members.size())];
              return true;
            } else if constexpr (std::is_same_v<T, SepSpace>) {
              out += ' ';
              return true;
            } else if constexpr (std::is_same_v<T, SepNewline>) {
              out += '\n';
              return true;
            } else {
              out += sym.bytes;
              return true;
            }
          },
          *item.symbol);
    }
  };

  CompiledGrammar compiled_;
  SampleLimits limits_;
  std::string id_;
};

inline TestCase sample_test_case(const Grammar& g, std::uint64_t seed, const SampleLimits& limits = {}) {
  return Sampler(g, limits).sample(seed);
}

inline std::vector<TestCase> sample_set(const Grammar& g, std::size_t k, std::uint64_t seed,
                                        const SampleLimits& limits = {}) {
  return Sampler(g, limits).sample_set(k, seed);
}

}  // namespace ccfg
