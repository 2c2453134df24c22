#pragma once

// Data model and textual notation for context-free grammars with counters.
//
// Production lines look like
//
//   <S> -> [t] <n> <T_t>
//   <T_i> -> <T_i-1> <n> [n] <s> [k] <n> <L_n> <n> <Z_k>
//   <L_1> -> a_1
//
// and constraint lines are comparison chains such as "1 <= l_i <= r_i <= n".
//
// RHS tokens are whitespace separated and classified as follows:
//   <s>, <n>            one space / one newline byte
//   <Name>, <Name_sub>  nonterminal, optionally subscripted
//   [ident]             counter binder
//   [set]{rep}          character class repeated rep times (rep: INT or IDENT)
//   ident, ident_sub    variable terminal (an integer drawn under constraints)
//   anything else       literal bytes
//
// Subscripts are INT, IDENT or IDENT-INT, optionally wrapped in braces.

#include <bitset>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccfg/error.hpp"

namespace ccfg {

struct SubConst {
  std::int64_t value = 0;
  bool operator==(const SubConst&) const = default;
};
struct SubVar {
  std::string name;
  bool operator==(const SubVar&) const = default;
};
/// name - offset, offset >= 1
struct SubVarMinus {
  std::string name;
  std::int64_t offset = 1;
  bool operator==(const SubVarMinus&) const = default;
};
using SubscriptExpr = std::variant<SubConst, SubVar, SubVarMinus>;

struct Nonterminal {
  std::string name;
  std::optional<SubscriptExpr> subscript;
  bool operator==(const Nonterminal&) const = default;
};
struct CounterBinder {
  std::string name;
  bool operator==(const CounterBinder&) const = default;
};
struct VariableTerminal {
  std::string name;
  std::optional<SubscriptExpr> index;
  bool operator==(const VariableTerminal&) const = default;
};
/// Repetition count of a character class: a literal count or a bare counter name.
using Repetition = std::variant<std::int64_t, std::string>;
struct CharClass {
  std::bitset<256> set;
  Repetition repetition = std::int64_t{1};
  bool operator==(const CharClass&) const = default;
};
struct SepSpace {
  bool operator==(const SepSpace&) const = default;
};
struct SepNewline {
  bool operator==(const SepNewline&) const = default;
};
struct Literal {
  std::string bytes;
  bool operator==(const Literal&) const = default;
};
using Symbol = std::variant<Nonterminal, CounterBinder, VariableTerminal, CharClass, SepSpace, SepNewline, Literal>;

struct Production {
  Nonterminal lhs;
  std::vector<Symbol> rhs;
  bool operator==(const Production&) const = default;
};

enum class CompareOp { Le, Lt };

struct IntLiteral {
  std::int64_t value = 0;
  bool operator==(const IntLiteral&) const = default;
};
struct VarRef {
  std::string name;
  bool indexed = false;
  bool operator==(const VarRef&) const = default;
};
using Atom = std::variant<IntLiteral, VarRef>;

/// atoms[0] ops[0] atoms[1] ops[1] ... ; ops.size() == atoms.size() - 1
struct Constraint {
  std::vector<Atom> atoms;
  std::vector<CompareOp> ops;
  bool operator==(const Constraint&) const = default;
};

struct Grammar {
  std::vector<Production> productions;
  std::vector<Constraint> constraints;
  std::string start = "S";
  bool operator==(const Grammar&) const = default;
};

namespace detail {

inline bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !is_alpha(s.front())) return false;
  for (char c : s)
    if (!is_alpha(c) && !is_digit(c)) return false;
  return true;
}

inline bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!is_digit(c)) return false;
  return true;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view strip_braces(std::string_view s) {
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') return s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] inline void counter_expr_error(std::string_view expr) {
  throw Error(ErrorKind::CounterExprUnsupported, "Counter operator parse failed: " + std::string(expr));
}

/// INT | IDENT | IDENT-INT
inline std::optional<SubscriptExpr> try_parse_subscript(std::string_view s) {
  s = strip_braces(s);
  if (is_digits(s)) {
    if (auto v = to_int(s)) return SubConst{*v};
    return std::nullopt;
  }
  if (is_identifier(s)) return SubVar{std::string(s)};
  const auto dash = s.find('-');
  if (dash != std::string_view::npos && is_identifier(s.substr(0, dash)) && is_digits(s.substr(dash + 1))) {
    auto off = to_int(s.substr(dash + 1));
    if (off && *off >= 1) return SubVarMinus{std::string(s.substr(0, dash)), *off};
  }
  return std::nullopt;
}

// Nonterminal subscript variables are counter-like names: one letter plus
// optional digits. Longer words read as multi-word names ("<Test_case>").
inline bool is_short_counter(std::string_view s) {
  if (s.empty() || !is_alpha(s.front())) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!is_digit(s[i])) return false;
  return true;
}

inline Nonterminal parse_nonterminal(std::string_view token) {
  // token includes the angle brackets
  const std::string_view body = token.substr(1, token.size() - 2);
  auto bad = [&]() -> Error {
    return Error(ErrorKind::InvalidNonterminal, "invalid nonterminal '" + std::string(token) + "'");
  };
  const auto us = body.find('_');
  const std::string_view name = body.substr(0, us);
  if (!is_identifier(name)) throw bad();
  if (us == std::string_view::npos) return Nonterminal{std::string(name), std::nullopt};
  const std::string_view sub = body.substr(us + 1);
  if (sub.empty()) throw bad();
  auto parsed = try_parse_subscript(sub);
  if (!parsed) {
    const std::string_view inner = strip_braces(sub);
    if (is_identifier(inner) || inner.find('_') != std::string_view::npos) throw bad();
    counter_expr_error(inner);
  }
  const std::string* var = nullptr;
  if (auto* v = std::get_if<SubVar>(&*parsed)) var = &v->name;
  if (auto* v = std::get_if<SubVarMinus>(&*parsed)) var = &v->name;
  if (var && !is_short_counter(*var)) throw bad();
  return Nonterminal{std::string(name), std::move(parsed)};
}

inline std::bitset<256> parse_char_set(std::string_view body, std::string_view token) {
  std::vector<unsigned char> chars;
  std::vector<bool> escaped;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size()) {
      chars.push_back(static_cast<unsigned char>(body[++i]));
      escaped.push_back(true);
    } else {
      chars.push_back(static_cast<unsigned char>(body[i]));
      escaped.push_back(false);
    }
  }
  std::bitset<256> set;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (i + 2 < chars.size() && chars[i + 1] == '-' && !escaped[i + 1]) {
      if (chars[i] > chars[i + 2])
        throw Error(ErrorKind::CounterExprUnsupported, "invalid character range in '" + std::string(token) + "'");
      for (unsigned c = chars[i]; c <= chars[i + 2]; ++c) set.set(c);
      i += 2;
    } else {
      set.set(chars[i]);
    }
  }
  return set;
}

inline Symbol parse_bracket_token(std::string_view token) {
  // find the closing bracket, honouring escapes
  std::size_t close = std::string_view::npos;
  for (std::size_t i = 1; i < token.size(); ++i) {
    if (token[i] == '\\') {
      ++i;
      continue;
    }
    if (token[i] == ']') {
      close = i;
      break;
    }
  }
  const std::string_view body = token.substr(1, close - 1);
  const std::string_view rest = token.substr(close + 1);
  if (is_identifier(body)) {
    if (!rest.empty()) counter_expr_error(rest);
    return CounterBinder{std::string(body)};
  }
  CharClass cls;
  cls.set = parse_char_set(body, token);
  if (rest.empty()) return cls;
  if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}') counter_expr_error(rest);
  const std::string_view rep = rest.substr(1, rest.size() - 2);
  if (is_digits(rep)) {
    auto v = to_int(rep);
    if (!v) counter_expr_error(rep);
    cls.repetition = *v;
  } else if (is_identifier(rep)) {
    cls.repetition = std::string(rep);
  } else {
    counter_expr_error(rep);
  }
  return cls;
}

inline bool has_bracket_pair(std::string_view token) {
  return token.size() >= 3 && token.front() == '[' && token.find(']') != std::string_view::npos && token[1] != ']';
}

}  // namespace detail

/// Classifies one RHS token. Total: every token yields a Symbol or throws.
inline Symbol parse_symbol(std::string_view token) {
  using namespace detail;
  if (token == "<s>") return SepSpace{};
  if (token == "<n>") return SepNewline{};
  if (token.size() >= 2 && token.front() == '<' && token.back() == '>') return parse_nonterminal(token);
  if (has_bracket_pair(token)) return parse_bracket_token(token);
  const auto us = token.find('_');
  const std::string_view base = token.substr(0, us);
  if (is_identifier(base)) {
    if (us == std::string_view::npos) return VariableTerminal{std::string(base), std::nullopt};
    const std::string_view sub = token.substr(us + 1);
    auto parsed = try_parse_subscript(sub);
    if (!parsed) counter_expr_error(strip_braces(sub));
    return VariableTerminal{std::string(base), std::move(parsed)};
  }
  return Literal{std::string(token)};
}

inline Production parse_production(std::string_view text) {
  const auto tokens = detail::split_ws(text);
  std::size_t arrow = 0;
  while (arrow < tokens.size() && tokens[arrow] != "->") ++arrow;
  if (arrow == tokens.size())
    throw Error(ErrorKind::MissingArrow, "production has no '->': '" + std::string(text) + "'");
  if (arrow != 1) {
    std::string lhs;
    for (std::size_t i = 0; i < arrow; ++i) lhs += (i ? " " : "") + std::string(tokens[i]);
    throw Error(ErrorKind::InvalidNonterminal, "left-hand side must be a single nonterminal, got '" + lhs + "'");
  }
  const std::string_view lhs_tok = tokens[0];
  if (lhs_tok.size() < 2 || lhs_tok.front() != '<' || lhs_tok.back() != '>' || lhs_tok == "<s>" || lhs_tok == "<n>")
    throw Error(ErrorKind::InvalidNonterminal, "invalid nonterminal '" + std::string(lhs_tok) + "'");
  Production p;
  p.lhs = detail::parse_nonterminal(lhs_tok);
  if (p.lhs.subscript && std::holds_alternative<SubVarMinus>(*p.lhs.subscript))
    throw Error(ErrorKind::CounterExprUnsupported,
                "Counter operator parse failed: left-hand side subscript of '" + std::string(lhs_tok) + "'");
  for (std::size_t i = arrow + 1; i < tokens.size(); ++i) p.rhs.push_back(parse_symbol(tokens[i]));
  return p;
}

namespace detail {

[[noreturn]] inline void malformed(std::string_view text, const std::string& why) {
  throw Error(ErrorKind::MalformedConstraint, why + " in '" + std::string(text) + "'");
}

inline std::optional<std::int64_t> checked_pow10(std::int64_t exp) {
  if (exp < 0 || exp > 18) return std::nullopt;
  std::int64_t v = 1;
  for (std::int64_t i = 0; i < exp; ++i) v *= 10;
  return v;
}

/// sign? ( digits | 10^k | c*10^k )
inline std::optional<std::int64_t> parse_int_literal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::int64_t coeff = 1;
  std::string_view power = s;
  const auto star = s.find('*');
  if (star != std::string_view::npos) {
    if (!is_digits(s.substr(0, star))) return std::nullopt;
    auto c = to_int(s.substr(0, star));
    if (!c) return std::nullopt;
    coeff = *c;
    power = s.substr(star + 1);
  }
  std::int64_t magnitude;
  const auto caret = power.find('^');
  if (caret != std::string_view::npos) {
    if (power.substr(0, caret) != "10" || !is_digits(power.substr(caret + 1))) return std::nullopt;
    auto e = to_int(power.substr(caret + 1));
    auto p = e ? checked_pow10(*e) : std::nullopt;
    if (!p) return std::nullopt;
    if (coeff != 0 && *p > INT64_MAX / coeff) return std::nullopt;
    magnitude = coeff * *p;
  } else {
    if (star != std::string_view::npos || !is_digits(power)) return std::nullopt;
    auto v = to_int(power);
    if (!v) return std::nullopt;
    magnitude = *v;
  }
  return negative ? -magnitude : magnitude;
}

inline Atom parse_atom(std::string_view tok, std::string_view text) {
  if (tok.empty()) malformed(text, "empty side");
  if (is_digit(tok.front()) || tok.front() == '-' || tok.front() == '+') {
    if (auto v = parse_int_literal(tok)) return IntLiteral{*v};
    malformed(text, "bad integer literal '" + std::string(tok) + "'");
  }
  const auto us = tok.find('_');
  const std::string_view base = tok.substr(0, us);
  if (!is_identifier(base)) malformed(text, "bad operand '" + std::string(tok) + "'");
  if (us == std::string_view::npos) return VarRef{std::string(base), false};
  if (!try_parse_subscript(tok.substr(us + 1))) malformed(text, "bad index on '" + std::string(tok) + "'");
  return VarRef{std::string(base), true};
}

}  // namespace detail

inline Constraint parse_constraint(std::string_view text) {
  using namespace detail;
  Constraint c;
  std::size_t i = 0;
  bool expect_atom = true;
  while (true) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    const char ch = text[i];
    const bool op_char = ch == '<' || ch == '>' || ch == '=' || ch == '!';
    if (op_char) {
      if (expect_atom) malformed(text, "empty side");
      if (ch == '<' && i + 1 < text.size() && text[i + 1] == '=') {
        c.ops.push_back(CompareOp::Le);
        i += 2;
      } else if (ch == '<' && (i + 1 == text.size() || (text[i + 1] != '>' && text[i + 1] != '<'))) {
        c.ops.push_back(CompareOp::Lt);
        i += 1;
      } else {
        std::size_t j = i;
        while (j < text.size() && (text[j] == '<' || text[j] == '>' || text[j] == '=' || text[j] == '!')) ++j;
        malformed(text, "unsupported operator '" + std::string(text.substr(i, j - i)) + "'");
      }
      expect_atom = true;
      continue;
    }
    if (!expect_atom) malformed(text, "missing operator");
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j]) && text[j] != '<' && text[j] != '>' && text[j] != '=' &&
           text[j] != '!')
      ++j;
    c.atoms.push_back(parse_atom(text.substr(i, j - i), text));
    i = j;
    expect_atom = false;
  }
  if (expect_atom) malformed(text, "empty side");
  if (c.atoms.size() < 2) malformed(text, "a constraint needs at least one comparison");
  return c;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string render_subscript(const SubscriptExpr& s) {
  if (auto* c = std::get_if<SubConst>(&s)) return std::to_string(c->value);
  if (auto* v = std::get_if<SubVar>(&s)) return v->name;
  const auto& m = std::get<SubVarMinus>(s);
  return m.name + "-" + std::to_string(m.offset);
}

inline std::string render_nonterminal(const Nonterminal& n) {
  std::string out = "<" + n.name;
  if (n.subscript) out += "_" + render_subscript(*n.subscript);
  return out + ">";
}

namespace detail {

inline void append_set_char(std::string& out, unsigned char c) {
  if (c == ']' || c == '\\' || c == '-') out += '\\';
  out += static_cast<char>(c);
}

inline std::string render_char_set(const std::bitset<256>& set) {
  std::vector<std::pair<unsigned, unsigned>> runs;
  for (unsigned c = 0; c < 256; ++c) {
    if (!set.test(c)) continue;
    if (!runs.empty() && runs.back().second + 1 == c)
      runs.back().second = c;
    else
      runs.emplace_back(c, c);
  }
  auto emit = [&](bool force_first_range) {
    std::string out;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto [lo, hi] = runs[r];
      if (hi - lo >= 2 || (r == 0 && force_first_range)) {
        append_set_char(out, static_cast<unsigned char>(lo));
        out += '-';
        append_set_char(out, static_cast<unsigned char>(hi));
      } else {
        for (unsigned c = lo; c <= hi; ++c) append_set_char(out, static_cast<unsigned char>(c));
      }
    }
    return out;
  };
  std::string body = emit(false);
  // a body that reads as an identifier would re-parse as a counter binder
  if (is_identifier(body)) body = emit(true);
  return body;
}

}  // namespace detail

inline std::string render_symbol(const Symbol& sym) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Nonterminal>) {
          return render_nonterminal(s);
        } else if constexpr (std::is_same_v<T, CounterBinder>) {
          return "[" + s.name + "]";
        } else if constexpr (std::is_same_v<T, VariableTerminal>) {
          return s.index ? s.name + "_" + render_subscript(*s.index) : s.name;
        } else if constexpr (std::is_same_v<T, CharClass>) {
          std::string out = "[" + detail::render_char_set(s.set) + "]";
          if (auto* n = std::get_if<std::int64_t>(&s.repetition)) {
            if (*n != 1) out += "{" + std::to_string(*n) + "}";
          } else {
            out += "{" + std::get<std::string>(s.repetition) + "}";
          }
          return out;
        } else if constexpr (std::is_same_v<T, SepSpace>) {
          return "<s>";
        } else if constexpr (std::is_same_v<T, SepNewline>) {
          return "<n>";
        } else {
          return s.bytes;
        }
      },
      sym);
}

inline std::string render_production(const Production& p) {
  std::string out = render_nonterminal(p.lhs) + " ->";
  for (const auto& s : p.rhs) out += " " + render_symbol(s);
  return out;
}

inline std::string render_constraint(const Constraint& c) {
  std::string out;
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    if (i) out += c.ops[i - 1] == CompareOp::Le ? " <= " : " < ";
    if (auto* lit = std::get_if<IntLiteral>(&c.atoms[i])) {
      out += std::to_string(lit->value);
    } else {
      const auto& ref = std::get<VarRef>(c.atoms[i]);
      out += ref.indexed ? ref.name + "_i" : ref.name;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Template instantiation

/// Name of the template variable when the production is a family template
/// (LHS subscript is a bare variable), else nullopt.
inline std::optional<std::string> template_variable(const Production& p) {
  if (p.lhs.subscript)
    if (auto* v = std::get_if<SubVar>(&*p.lhs.subscript)) return v->name;
  return std::nullopt;
}

/// Evaluates `expr` with `var` = k; other variables are left untouched.
inline SubscriptExpr substitute(const SubscriptExpr& expr, const std::string& var, std::int64_t k) {
  if (auto* v = std::get_if<SubVar>(&expr); v && v->name == var) return SubConst{k};
  if (auto* m = std::get_if<SubVarMinus>(&expr); m && m->name == var) return SubConst{k - m->offset};
  return expr;
}

/// Unrolls one step of a template production: T_i -> ... becomes T_k -> ...
inline Production instantiate(const Production& templ, std::int64_t k) {
  const auto var = template_variable(templ);
  if (!var) throw Error(ErrorKind::InvalidArgument, render_production(templ) + " is not a template production");
  if (k < 1) throw Error(ErrorKind::NonPositiveSubscript, "template value " + std::to_string(k) + " < 1");
  auto check = [&](const SubscriptExpr& e, const std::string& what) {
    if (auto* c = std::get_if<SubConst>(&e); c && c->value <= 0)
      throw Error(ErrorKind::NonPositiveSubscript, what + " evaluates to subscript " + std::to_string(c->value));
    return e;
  };
  Production out;
  out.lhs = Nonterminal{templ.lhs.name, SubConst{k}};
  for (const auto& sym : templ.rhs) {
    if (auto* nt = std::get_if<Nonterminal>(&sym); nt && nt->subscript) {
      Nonterminal r{nt->name, substitute(*nt->subscript, *var, k)};
      check(*r.subscript, render_nonterminal(*nt));
      out.rhs.emplace_back(std::move(r));
    } else if (auto* vt = std::get_if<VariableTerminal>(&sym); vt && vt->index) {
      VariableTerminal r{vt->name, substitute(*vt->index, *var, k)};
      check(*r.index, render_symbol(*vt));
      out.rhs.emplace_back(std::move(r));
    } else if (auto* cc = std::get_if<CharClass>(&sym)) {
      CharClass r = *cc;
      if (auto* name = std::get_if<std::string>(&cc->repetition); name && *name == *var) r.repetition = k;
      out.rhs.emplace_back(std::move(r));
    } else {
      out.rhs.push_back(sym);
    }
  }
  return out;
}

}  // namespace ccfg
