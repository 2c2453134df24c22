#pragma once

// Well-formedness checks, grouped into the five error categories used as
// refinement feedback.

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ccfg/compiled.hpp"
#include "ccfg/document.hpp"
#include "ccfg/grammar.hpp"
#include "ccfg/random.hpp"
#include "ccfg/sampler.hpp"

namespace ccfg {

enum class Category {
  NullGrammar,
  UnbracketedCounterVariable,
  MissingVariableReference,
  NodeOverflow,
  InvalidNonterminal,
};

constexpr std::string_view to_string(Category c) {
  switch (c) {
    case Category::NullGrammar: return "NullGrammar";
    case Category::UnbracketedCounterVariable: return "UnbracketedCounterVariable";
    case Category::MissingVariableReference: return "MissingVariableReference";
    case Category::NodeOverflow: return "NodeOverflow";
    case Category::InvalidNonterminal: return "InvalidNonterminal";
  }
  return "Unknown";
}

struct WellFormednessError {
  Category category;
  std::string message;
  Location location;
};

struct WellFormednessReport {
  bool well_formed = true;
  std::vector<WellFormednessError> errors;
  std::vector<std::string> warnings;

  void add(Category c, std::string message, Location where) {
    errors.push_back({c, std::move(message), where});
    well_formed = false;
  }
};

struct ValidateOptions {
  std::size_t node_budget = 100'000;
  std::size_t retry_budget = 1'000;
  std::size_t trials = 3;
  std::uint64_t seed = 0;
};

/// Document-level parse failures mapped onto the categories.
inline Category category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidNonterminal:
    case ErrorKind::MissingArrow:
    case ErrorKind::UndefinedNonterminal:
      return Category::InvalidNonterminal;
    case ErrorKind::CounterExprUnsupported:
    case ErrorKind::MalformedConstraint:
    case ErrorKind::UnboundCounter:
      return Category::UnbracketedCounterVariable;
    case ErrorKind::NodeBudgetExceeded:
    case ErrorKind::OutputBudgetExceeded:
    case ErrorKind::RetriesExhausted:
      return Category::NodeOverflow;
    default:
      return Category::NullGrammar;
  }
}

namespace detail {

inline void check_references(const CompiledGrammar& cg, WellFormednessReport& report) {
  const auto& prods = cg.grammar().productions;
  for (std::size_t i = 0; i < prods.size(); ++i) {
    for (const auto& sym : prods[i].rhs) {
      const auto* nt = std::get_if<Nonterminal>(&sym);
      if (!nt) continue;
      const auto* fam = cg.family(nt->name);
      if (!fam) {
        report.add(Category::InvalidNonterminal, "nonterminal " + render_nonterminal(*nt) + " has no production",
                   Location::production(i));
      } else if (nt->subscript && fam->exact.empty() && fam->templates.empty()) {
        report.add(Category::InvalidNonterminal,
                   "subscripted " + render_nonterminal(*nt) + " but <" + nt->name + "> has no subscripted production",
                   Location::production(i));
      } else if (!nt->subscript && fam->plain.empty()) {
        report.add(Category::InvalidNonterminal,
                   "<" + nt->name + "> used without subscript but only subscripted productions exist",
                   Location::production(i));
      }
    }
  }
}

inline void check_counters(const CompiledGrammar& cg, WellFormednessReport& report) {
  const auto& prods = cg.grammar().productions;
  for (std::size_t i = 0; i < prods.size(); ++i) {
    const auto local = template_variable(prods[i]);
    std::set<std::string> flagged;
    auto use = [&](const std::string& var, const std::string& where) {
      if (var.empty() || (local && var == *local) || cg.binder_names().count(var) || !flagged.insert(var).second)
        return;
      report.add(Category::UnbracketedCounterVariable,
                 "counter '" + var + "' used in '" + where + "' is never bound by [" + var + "]",
                 Location::production(i));
    };
    for (const auto& sym : prods[i].rhs) {
      if (auto* nt = std::get_if<Nonterminal>(&sym); nt && nt->subscript)
        use(subscript_var(*nt->subscript), render_nonterminal(*nt));
      if (auto* vt = std::get_if<VariableTerminal>(&sym); vt && vt->index)
        use(subscript_var(*vt->index), render_symbol(*vt));
      if (auto* cc = std::get_if<CharClass>(&sym))
        if (auto* name = std::get_if<std::string>(&cc->repetition)) use(*name, render_symbol(*cc));
    }
  }
}

inline void check_variable_references(const CompiledGrammar& cg, WellFormednessReport& report) {
  const auto& g = cg.grammar();
  std::set<std::string> in_constraints;
  for (std::size_t ci = 0; ci < g.constraints.size(); ++ci)
    for (const auto& atom : g.constraints[ci].atoms)
      if (auto* ref = std::get_if<VarRef>(&atom)) in_constraints.insert(ref->name);

  std::set<std::string> in_productions;
  for (std::size_t i = 0; i < g.productions.size(); ++i)
    for (const auto& sym : g.productions[i].rhs) {
      std::string name;
      if (auto* b = std::get_if<CounterBinder>(&sym)) name = b->name;
      if (auto* vt = std::get_if<VariableTerminal>(&sym)) name = vt->name;
      if (name.empty() || !in_productions.insert(name).second) continue;
      if (!in_constraints.count(name))
        report.add(Category::MissingVariableReference, "variable '" + name + "' has no constraint",
                   Location::production(i));
    }

  std::set<std::string> flagged;
  for (std::size_t ci = 0; ci < g.constraints.size(); ++ci)
    for (const auto& atom : g.constraints[ci].atoms) {
      const auto* ref = std::get_if<VarRef>(&atom);
      if (!ref || in_productions.count(ref->name) || !flagged.insert(ref->name).second) continue;
      report.add(Category::MissingVariableReference,
                 "constraint variable '" + ref->name + "' does not occur in any production", Location::constraint(ci));
    }
}

inline void check_generability(const Grammar& g, const ValidateOptions& opt, WellFormednessReport& report) {
  SampleLimits limits;
  limits.node_budget = opt.node_budget;
  limits.retry_budget = opt.retry_budget;
  const Sampler sampler(g, limits);
  std::vector<Error> failures;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    try {
      sampler.sample(split_seed(opt.seed, t));
      return;
    } catch (const Error& e) {
      failures.push_back(e);
    }
  }
  if (failures.empty()) return;
  for (const auto& e : failures) {
    if (e.kind() == ErrorKind::UnboundCounter) {
      report.add(Category::UnbracketedCounterVariable, e.detail(), Location::global());
      return;
    }
    if (e.kind() == ErrorKind::UndefinedNonterminal) {
      report.add(Category::InvalidNonterminal, e.detail(), Location::global());
      return;
    }
  }
  report.add(Category::NodeOverflow,
             "too many nodes found, not valid grammar (" + std::to_string(failures.size()) +
                 " trial derivations failed; last: " + failures.back().detail() + ")",
             Location::global());
}

}  // namespace detail

inline WellFormednessReport validate(const Grammar& g, const ValidateOptions& opt = {}) {
  WellFormednessReport report;
  const CompiledGrammar cg(g);
  report.warnings = cg.lints();

  bool has_start = false;
  for (const auto& p : g.productions) has_start |= p.lhs.name == g.start && !p.lhs.subscript;
  if (g.productions.empty())
    report.add(Category::NullGrammar, "grammar has no productions", Location::global());
  else if (!has_start)
    report.add(Category::NullGrammar, "no production for start symbol <" + g.start + ">", Location::global());

  detail::check_references(cg, report);
  detail::check_counters(cg, report);
  const bool structurally_sound = report.errors.empty();
  detail::check_variable_references(cg, report);

  for (const auto& name : cg.binder_names()) {
    bool used = false;
    for (const auto& p : cg.grammar().productions)
      for (const auto& sym : p.rhs) {
        if (auto* nt = std::get_if<Nonterminal>(&sym); nt && nt->subscript)
          used |= detail::subscript_var(*nt->subscript) == name;
        if (auto* vt = std::get_if<VariableTerminal>(&sym); vt && vt->index)
          used |= detail::subscript_var(*vt->index) == name;
        if (auto* cc = std::get_if<CharClass>(&sym))
          if (auto* r = std::get_if<std::string>(&cc->repetition)) used |= *r == name;
      }
    if (!used) report.warnings.push_back("counter '" + name + "' is bound but never used as a subscript or count");
  }

  if (structurally_sound) detail::check_generability(g, opt, report);
  return report;
}

/// Validates a container document, folding parse failures into the report.
inline WellFormednessReport validate_document(std::string_view bytes, const ValidateOptions& opt = {}) {
  auto parsed = parse_grammar_document_lenient(bytes);
  if (parsed.ok()) return validate(parsed.grammar, opt);
  WellFormednessReport report;
  for (const auto& issue : parsed.issues) report.add(category_of(issue.kind), issue.message, issue.location);
  return report;
}

/// One "<Category>: <message>" line per error, ordered by location then category.
inline std::vector<std::string> feedback_text(const WellFormednessReport& report) {
  std::vector<const WellFormednessError*> order;
  for (const auto& e : report.errors) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->location != b->location) return a->location < b->location;
    return a->category < b->category;
  });
  std::vector<std::string> lines;
  for (const auto* e : order) lines.push_back(std::string(to_string(e->category)) + ": " + e->message);
  return lines;
}

inline json report_to_json(const WellFormednessReport& r) {
  json errors = json::array();
  for (const auto& e : r.errors)
    errors.push_back({{"category", to_string(e.category)}, {"message", e.message}, {"location", e.location.to_string()}});
  return json{{"well_formed", r.well_formed}, {"errors", std::move(errors)}, {"warnings", r.warnings}};
}

}  // namespace ccfg
