#pragma once

// Lookup structures shared by the sampler, the recognizer and the validator.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ccfg/constraints.hpp"
#include "ccfg/grammar.hpp"

namespace ccfg {

class CompiledGrammar {
 public:
  struct Family {
    std::vector<std::size_t> plain;                             // <X>
    std::map<std::int64_t, std::vector<std::size_t>> exact;     // <X_3>
    std::vector<std::size_t> templates;                         // <X_i>
  };

  explicit CompiledGrammar(Grammar g) : grammar_(std::move(g)) {
    start_ = Nonterminal{grammar_.start, std::nullopt};
    collect_names();
    resolve_base_indices();
    normalize_constraints();
    for (std::size_t i = 0; i < grammar_.productions.size(); ++i) {
      const auto& p = grammar_.productions[i];
      auto& fam = families_[p.lhs.name];
      std::int64_t min_k = 1;
      if (!p.lhs.subscript) {
        fam.plain.push_back(i);
      } else if (auto* c = std::get_if<SubConst>(&*p.lhs.subscript)) {
        fam.exact[c->value].push_back(i);
      } else {
        fam.templates.push_back(i);
        const auto& var = std::get<SubVar>(*p.lhs.subscript).name;
        for (const auto& sym : p.rhs) {
          const SubscriptExpr* e = nullptr;
          if (auto* nt = std::get_if<Nonterminal>(&sym); nt && nt->subscript) e = &*nt->subscript;
          if (auto* vt = std::get_if<VariableTerminal>(&sym); vt && vt->index) e = &*vt->index;
          if (e)
            if (auto* m = std::get_if<SubVarMinus>(e); m && m->name == var) min_k = std::max(min_k, m->offset + 1);
        }
      }
      template_min_.push_back(min_k);
    }
  }

  const Grammar& grammar() const { return grammar_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Nonterminal& start() const { return start_; }
  const std::vector<std::string>& lints() const { return lints_; }
  const std::set<std::string>& binder_names() const { return binders_; }

  const Family* family(const std::string& name) const {
    auto it = families_.find(name);
    return it == families_.end() ? nullptr : &it->second;
  }

  /// Productions applicable to `name` with concrete subscript `k` (or no
  /// subscript). Exact-subscript productions shadow the template family; a
  /// template applies only when every subscript it produces stays >= 1.
  std::vector<std::size_t> candidates(const Family& fam, std::optional<std::int64_t> k) const {
    if (!k) return fam.plain;
    if (auto it = fam.exact.find(*k); it != fam.exact.end() && !it->second.empty()) return it->second;
    std::vector<std::size_t> out;
    for (auto i : fam.templates)
      if (*k >= template_min_[i]) out.push_back(i);
    return out;
  }

 private:
  void collect_names() {
    for (const auto& p : grammar_.productions)
      for (const auto& sym : p.rhs) {
        if (auto* b = std::get_if<CounterBinder>(&sym)) {
          binders_.insert(b->name);
          scalar_names_.insert(b->name);
        } else if (auto* vt = std::get_if<VariableTerminal>(&sym)) {
          (vt->index ? indexed_names_ : scalar_names_).insert(vt->name);
        }
      }
  }

  // "<T_1> -> a_i": an index variable that nothing binds, inside a base
  // production for subscript 1, is read as index 1.
  void resolve_base_indices() {
    for (std::size_t i = 0; i < grammar_.productions.size(); ++i) {
      auto& p = grammar_.productions[i];
      const auto* c = p.lhs.subscript ? std::get_if<SubConst>(&*p.lhs.subscript) : nullptr;
      if (!c || c->value != 1) continue;
      for (auto& sym : p.rhs) {
        auto* vt = std::get_if<VariableTerminal>(&sym);
        if (!vt || !vt->index) continue;
        auto* v = std::get_if<SubVar>(&*vt->index);
        if (!v || binders_.count(v->name)) continue;
        lints_.push_back("production " + std::to_string(i) + ": unbound index '" + v->name + "' of '" + vt->name +
                         "' in base production read as 1");
        vt->index = SubConst{1};
      }
    }
  }

  // A constraint spelling "a" for a variable only ever used as a_i (or the
  // reverse) refers to that variable.
  void normalize_constraints() {
    constraints_ = grammar_.constraints;
    for (std::size_t ci = 0; ci < constraints_.size(); ++ci)
      for (auto& atom : constraints_[ci].atoms) {
        auto* ref = std::get_if<VarRef>(&atom);
        if (!ref) continue;
        const bool scalar = scalar_names_.count(ref->name) > 0;
        const bool indexed = indexed_names_.count(ref->name) > 0;
        if (ref->indexed && scalar && !indexed) {
          ref->indexed = false;
          lints_.push_back("constraint " + std::to_string(ci) + ": '" + ref->name + "_i' refers to scalar '" +
                           ref->name + "'");
        } else if (!ref->indexed && indexed && !scalar) {
          ref->indexed = true;
          lints_.push_back("constraint " + std::to_string(ci) + ": '" + ref->name + "' refers to indexed '" +
                           ref->name + "_i'");
        }
      }
  }

  Grammar grammar_;
  std::vector<Constraint> constraints_;
  Nonterminal start_;
  std::map<std::string, Family> families_;
  std::vector<std::int64_t> template_min_;
  std::set<std::string> binders_;
  std::set<std::string> scalar_names_;
  std::set<std::string> indexed_names_;
  std::vector<std::string> lints_;
};

namespace detail {

/// Active production during a derivation: gives meaning to its template variable.
struct Frame {
  const Production* production = nullptr;
  std::int64_t value = 0;
};

inline std::optional<std::int64_t> resolve_name(const std::string& name, const Frame& frame, const Assignment& a) {
  if (frame.production) {
    const auto& lhs = frame.production->lhs;
    if (lhs.subscript)
      if (auto* v = std::get_if<SubVar>(&*lhs.subscript); v && v->name == name) return frame.value;
  }
  return a.get(VarKey{name, std::nullopt});
}

inline std::optional<std::int64_t> resolve(const SubscriptExpr& e, const Frame& frame, const Assignment& a) {
  if (auto* c = std::get_if<SubConst>(&e)) return c->value;
  if (auto* v = std::get_if<SubVar>(&e)) return resolve_name(v->name, frame, a);
  const auto& m = std::get<SubVarMinus>(e);
  auto base = resolve_name(m.name, frame, a);
  if (!base) return std::nullopt;
  return *base - m.offset;
}

inline std::optional<std::int64_t> resolve(const Repetition& r, const Frame& frame, const Assignment& a) {
  if (auto* n = std::get_if<std::int64_t>(&r)) return *n;
  return resolve_name(std::get<std::string>(r), frame, a);
}

inline std::string subscript_var(const SubscriptExpr& e) {
  if (auto* v = std::get_if<SubVar>(&e)) return v->name;
  if (auto* m = std::get_if<SubVarMinus>(&e)) return m->name;
  return {};
}

}  // namespace detail
}  // namespace ccfg
