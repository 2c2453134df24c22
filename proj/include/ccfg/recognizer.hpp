#pragma once

// Membership test for a test case against a grammar.
//
// Top-down, leftmost, with chronological backtracking over production
// choices. Binders and variable terminals consume one maximal integer token
// and must fall inside the same feasible interval the sampler would have
// drawn from, so the recognizer accepts exactly what the sampler can emit.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ccfg/compiled.hpp"
#include "ccfg/constraints.hpp"
#include "ccfg/grammar.hpp"

namespace ccfg {

struct ParseOptions {
  std::size_t step_budget = 1'000'000;
  bool tolerate_trailing_newline = false;
  Interval default_range = kDefaultRange;
};

struct ParseResult {
  bool accepted = false;
  /// Step budget ran out before a decision; never reported as a plain reject.
  bool inconclusive = false;
  Assignment assignment;
  std::string reason;
  std::size_t position = 0;
  std::size_t steps_used = 0;
};

namespace detail {

/// Lexes "0" | "-"? [1-9][0-9]* at `pos`, maximal munch. Returns the value
/// and its length, or nullopt for anything else (leading zeros, "-0", overflow).
inline std::optional<std::pair<std::int64_t, std::size_t>> lex_integer(std::string_view in, std::size_t pos) {
  std::size_t i = pos;
  const bool negative = i < in.size() && in[i] == '-';
  if (negative) ++i;
  const std::size_t digits_at = i;
  while (i < in.size() && is_digit(in[i])) ++i;
  const std::size_t ndigits = i - digits_at;
  if (ndigits == 0) return std::nullopt;
  if (in[digits_at] == '0' && (ndigits > 1 || negative)) return std::nullopt;
  auto v = to_int(in.substr(pos, i - pos));
  if (!v) return std::nullopt;
  return std::make_pair(*v, i - pos);
}

}  // namespace detail

class Recognizer {
 public:
  explicit Recognizer(Grammar grammar, ParseOptions options = {})
      : compiled_(std::move(grammar)), options_(options) {}

  const CompiledGrammar& compiled() const { return compiled_; }

  ParseResult parse(std::string_view input) const { return Run(*this, input).go(); }

 private:
  struct Node {
    const Symbol* symbol;
    std::size_t frame;
    std::ptrdiff_t next;
  };

  struct Choice {
    std::ptrdiff_t head;
    std::size_t pos;
    std::size_t trail;
    std::size_t arena;
    std::size_t frames;
    std::int64_t k;
    std::vector<std::size_t> alternatives;
    std::size_t next_alt;
  };

  struct Run {
    const Recognizer& r;
    std::string_view in;
    Symbol start_symbol;
    std::vector<Node> arena;
    std::vector<detail::Frame> frames{detail::Frame{}};
    std::vector<std::pair<VarKey, std::optional<std::int64_t>>> trail;
    std::vector<Choice> choices;
    Assignment assignment;
    std::ptrdiff_t head = -1;
    std::size_t pos = 0;
    std::size_t furthest = 0;
    std::string reason = "no derivation";

    Run(const Recognizer& rec, std::string_view input)
        : r(rec), in(input), start_symbol(rec.compiled_.start()) {}

    void note(const std::string& why) {
      if (pos >= furthest) {
        furthest = pos;
        reason = why;
      }
    }

    void expand(std::size_t prod, std::int64_t k) {
      const Production& p = r.compiled_.grammar().productions[prod];
      frames.push_back(detail::Frame{&p, k});
      const std::size_t f = frames.size() - 1;
      for (auto it = p.rhs.rbegin(); it != p.rhs.rend(); ++it) {
        arena.push_back(Node{&*it, f, head});
        head = static_cast<std::ptrdiff_t>(arena.size()) - 1;
      }
    }

    // Restores the most recent choice point and takes its next alternative.
    bool backtrack() {
      if (choices.empty()) return false;
      Choice& c = choices.back();
      while (trail.size() > c.trail) {
        assignment.restore(trail.back().first, trail.back().second);
        trail.pop_back();
      }
      arena.resize(c.arena);
      frames.resize(c.frames);
      head = c.head;
      pos = c.pos;
      const std::size_t prod = c.alternatives[c.next_alt++];
      const std::int64_t k = c.k;
      if (c.next_alt == c.alternatives.size()) choices.pop_back();
      expand(prod, k);
      return true;
    }

    ParseResult finish(bool accepted, bool inconclusive, std::size_t steps) {
      ParseResult res;
      res.accepted = accepted;
      res.inconclusive = inconclusive;
      res.steps_used = steps;
      if (accepted) {
        res.assignment = std::move(assignment);
        res.position = in.size();
      } else {
        res.reason = inconclusive ? "step budget exhausted after " + std::to_string(steps) + " steps" : reason;
        res.position = inconclusive ? pos : furthest;
      }
      return res;
    }

    bool bind(const VarKey& key) {
      auto tok = detail::lex_integer(in, pos);
      if (!tok) {
        note("expected integer for '" + key.to_string() + "'");
        return false;
      }
      const Interval iv = feasible_interval(r.compiled_.constraints(), key, assignment, r.options_.default_range);
      if (!iv.contains(tok->first)) {
        note("value " + std::to_string(tok->first) + " of '" + key.to_string() + "' violates constraints (feasible [" +
             std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "])");
        return false;
      }
      trail.emplace_back(key, assignment.set(key, tok->first));
      pos += tok->second;
      return true;
    }

    bool step(const Node& node) {
      const detail::Frame frame = frames[node.frame];
      return std::visit(
          [&](const auto& sym) -> bool {
            using T = std::decay_t<decltype(sym)>;
            if constexpr (std::is_same_v<T, Nonterminal>) {
              std::optional<std::int64_t> k;
              if (sym.subscript) {
                k = detail::resolve(*sym.subscript, frame, assignment);
                if (!k) {
                  note("counter read before binding in '" + render_nonterminal(sym) + "'");
                  return false;
                }
              }
              const auto* fam = r.compiled_.family(sym.name);
              if (!fam) {
                note("no production for <" + sym.name + ">");
                return false;
              }
              auto cands = r.compiled_.candidates(*fam, k);
              if (cands.empty()) {
                note("no applicable production for " + render_nonterminal(Nonterminal{sym.name, k ? std::optional<SubscriptExpr>(SubConst{*k}) : std::nullopt}));
                return false;
              }
              if (cands.size() > 1)
                choices.push_back(Choice{head, pos, trail.size(), arena.size(), frames.size(), k.value_or(0), cands, 1});
              expand(cands[0], k.value_or(0));
              return true;
            } else if constexpr (std::is_same_v<T, CounterBinder>) {
              return bind(VarKey{sym.name, std::nullopt});
            } else if constexpr (std::is_same_v<T, VariableTerminal>) {
              std::optional<std::int64_t> idx;
              if (sym.index) {
                idx = detail::resolve(*sym.index, frame, assignment);
                if (!idx) {
                  note("counter read before binding in '" + render_symbol(sym) + "'");
                  return false;
                }
              }
              return bind(VarKey{sym.name, idx});
            } else if constexpr (std::is_same_v<T, CharClass>) {
              auto rep = detail::resolve(sym.repetition, frame, assignment);
              if (!rep) {
                note("counter read before binding in '" + render_symbol(sym) + "'");
                return false;
              }
              if (*rep < 0 || static_cast<std::uint64_t>(*rep) > in.size() - pos) {
                note("expected " + std::to_string(*rep) + " characters of " + render_symbol(sym));
                return false;
              }
              for (std::int64_t i = 0; i < *rep; ++i) {
                if (!sym.set.test(static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)]))) {
                  const std::size_t at = pos;
                  pos += static_cast<std::size_t>(i);
                  note("character outside " + render_symbol(sym));
                  pos = at;
                  return false;
                }
              }
              pos += static_cast<std::size_t>(*rep);
              return true;
            } else {
              std::string_view want;
              if constexpr (std::is_same_v<T, SepSpace>) want = " ";
              else if constexpr (std::is_same_v<T, SepNewline>) want = "\n";
              else want = sym.bytes;
              if (in.substr(pos, want.size()) != want) {
                note(std::is_same_v<T, SepSpace>     ? std::string("expected <s>")
                     : std::is_same_v<T, SepNewline> ? std::string("expected <n>")
                                                     : "expected '" + std::string(want) + "'");
                return false;
              }
              pos += want.size();
              return true;
            }
          },
          *node.symbol);
    }

    ParseResult go() {
      arena.push_back(Node{&start_symbol, 0, -1});
      head = 0;
      std::size_t steps = 0;
      while (true) {
        if (++steps > r.options_.step_budget) return finish(false, true, steps - 1);
        bool ok;
        if (head < 0) {
          const std::size_t rest = in.size() - pos;
          const bool consumed =
              rest == 0 || (r.options_.tolerate_trailing_newline && rest == 1 && in[pos] == '\n');
          if (!consumed) {
            note("trailing input");
            ok = false;
          } else if (auto v = find_violation(r.compiled_.constraints(), assignment)) {
            note(*v);
            ok = false;
          } else {
            return finish(true, false, steps);
          }
        } else {
          const Node node = arena[static_cast<std::size_t>(head)];
          head = node.next;
          ok = step(node);
        }
        if (!ok && !backtrack()) return finish(false, false, steps);
      }
    }
  };

  CompiledGrammar compiled_;
  ParseOptions options_;
};

inline ParseResult parse_test_case(const Grammar& g, std::string_view input, const ParseOptions& options = {}) {
  return Recognizer(g, options).parse(input);
}

}  // namespace ccfg
