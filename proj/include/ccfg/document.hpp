#pragma once

// Grammar container document:
//   {"grammar": {"productions": ["<S> -> ..."], "constraints": ["1 <= n <= 10"]}}

#include <string>
#include <string_view>
#include <vector>

#include "ccfg/error.hpp"
#include "ccfg/grammar.hpp"
#include "json.hpp"

namespace ccfg {

using json = nlohmann::json;

/// Where a problem was found inside a grammar.
struct Location {
  enum class Kind { Production, Constraint, Global };
  Kind kind = Kind::Global;
  std::size_t index = 0;

  static Location production(std::size_t i) { return {Kind::Production, i}; }
  static Location constraint(std::size_t i) { return {Kind::Constraint, i}; }
  static Location global() { return {}; }

  std::string to_string() const {
    switch (kind) {
      case Kind::Production: return "production:" + std::to_string(index);
      case Kind::Constraint: return "constraint:" + std::to_string(index);
      case Kind::Global: break;
    }
    return "global";
  }
  auto operator<=>(const Location&) const = default;
};

struct DocumentIssue {
  ErrorKind kind;
  std::string message;
  Location location;
};

/// Every string parsed independently so that all problems are reported.
struct DocumentParse {
  Grammar grammar;  // successfully parsed entries only
  std::vector<DocumentIssue> issues;

  bool ok() const { return issues.empty(); }
};

inline DocumentParse parse_grammar_document_lenient(std::string_view bytes) {
  DocumentParse out;
  json doc = json::parse(bytes.begin(), bytes.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    out.issues.push_back({ErrorKind::NullGrammar, "document is not valid JSON", Location::global()});
    return out;
  }
  if (!doc.is_object() || !doc.contains("grammar") || !doc["grammar"].is_object()) {
    out.issues.push_back({ErrorKind::NullGrammar, "document has no \"grammar\" object", Location::global()});
    return out;
  }
  const json& g = doc["grammar"];
  auto strings = [&](const char* key, bool required) -> std::vector<std::string> {
    std::vector<std::string> v;
    if (!g.contains(key) || g[key].is_null()) {
      if (required) out.issues.push_back({ErrorKind::NullGrammar, std::string("no \"") + key + "\" list", Location::global()});
      return v;
    }
    if (!g[key].is_array()) {
      out.issues.push_back({ErrorKind::MalformedDocument, std::string("\"") + key + "\" is not a list", Location::global()});
      return v;
    }
    for (const auto& item : g[key]) {
      if (!item.is_string()) {
        out.issues.push_back({ErrorKind::MalformedDocument, std::string("non-string entry in \"") + key + "\"", Location::global()});
        v.emplace_back();
        continue;
      }
      v.push_back(item.get<std::string>());
    }
    return v;
  };
  const auto prods = strings("productions", true);
  const auto cons = strings("constraints", false);
  // the prompt format's empty placeholder [""] counts as no entry
  std::size_t nonblank = 0;
  for (const auto& p : prods) nonblank += detail::split_ws(p).empty() ? 0 : 1;
  if (g.contains("productions") && g["productions"].is_array() && nonblank == 0)
    out.issues.push_back({ErrorKind::NullGrammar, "productions list is empty", Location::global()});
  for (std::size_t i = 0; i < prods.size(); ++i) {
    if (detail::split_ws(prods[i]).empty()) continue;
    try {
      out.grammar.productions.push_back(parse_production(prods[i]));
    } catch (const Error& e) {
      out.issues.push_back({e.kind(), e.detail(), Location::production(i)});
    }
  }
  for (std::size_t i = 0; i < cons.size(); ++i) {
    if (detail::split_ws(cons[i]).empty()) continue;
    try {
      out.grammar.constraints.push_back(parse_constraint(cons[i]));
    } catch (const Error& e) {
      out.issues.push_back({e.kind(), e.detail(), Location::constraint(i)});
    }
  }
  return out;
}

/// Strict form: throws the first problem, annotated with its list index.
inline Grammar parse_grammar_document(std::string_view bytes) {
  auto parsed = parse_grammar_document_lenient(bytes);
  if (!parsed.ok()) {
    const auto& issue = parsed.issues.front();
    throw Error(issue.kind, issue.location.to_string() + ": " + issue.message);
  }
  return std::move(parsed.grammar);
}

inline json grammar_to_json(const Grammar& g) {
  json prods = json::array();
  for (const auto& p : g.productions) prods.push_back(render_production(p));
  json cons = json::array();
  for (const auto& c : g.constraints) cons.push_back(render_constraint(c));
  return json{{"grammar", {{"productions", std::move(prods)}, {"constraints", std::move(cons)}}}};
}

inline std::string render_grammar(const Grammar& g) { return grammar_to_json(g).dump(2) + "\n"; }

}  // namespace ccfg
