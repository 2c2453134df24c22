#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccfg/grammar.hpp"

namespace ccfg {

/// A variable instance: a scalar counter ("n") or one element of an indexed
/// family ("a" at index 3).
struct VarKey {
  std::string name;
  std::optional<std::int64_t> index;

  auto operator<=>(const VarKey&) const = default;

  std::string to_string() const { return index ? name + "_" + std::to_string(*index) : name; }
};

/// Closed integer interval; empty when lo > hi.
struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  bool empty() const { return lo > hi; }
  bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
  bool operator==(const Interval&) const = default;
};

inline constexpr Interval kDefaultRange{-1'000'000'000, 1'000'000'000};

/// Values bound during one derivation. Re-binding a key overwrites it.
class Assignment {
 public:
  struct Slots {
    std::optional<std::int64_t> scalar;
    std::map<std::int64_t, std::int64_t> indexed;
    bool operator==(const Slots&) const = default;
  };

  std::optional<std::int64_t> get(const VarKey& key) const {
    auto it = vars_.find(key.name);
    if (it == vars_.end()) return std::nullopt;
    if (!key.index) return it->second.scalar;
    auto jt = it->second.indexed.find(*key.index);
    if (jt == it->second.indexed.end()) return std::nullopt;
    return jt->second;
  }

  /// Binds key and returns the value it replaced.
  std::optional<std::int64_t> set(const VarKey& key, std::int64_t value) {
    auto& slots = vars_[key.name];
    std::optional<std::int64_t> previous;
    if (!key.index) {
      previous = slots.scalar;
      slots.scalar = value;
    } else {
      auto [it, inserted] = slots.indexed.try_emplace(*key.index, value);
      if (!inserted) {
        previous = it->second;
        it->second = value;
      }
    }
    return previous;
  }

  /// Undo helper: restores key to `previous` (unbinding when nullopt).
  void restore(const VarKey& key, std::optional<std::int64_t> previous) {
    auto& slots = vars_[key.name];
    if (!key.index) {
      slots.scalar = previous;
    } else if (previous) {
      slots.indexed[*key.index] = *previous;
    } else {
      slots.indexed.erase(*key.index);
    }
  }

  const Slots* slots(const std::string& name) const {
    auto it = vars_.find(name);
    return it == vars_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, Slots>& bases() const { return vars_; }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, s] : vars_) n += (s.scalar ? 1 : 0) + s.indexed.size();
    return n;
  }

  bool operator==(const Assignment&) const = default;

 private:
  std::map<std::string, Slots> vars_;
};

namespace detail {

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (b > 0 && a > std::numeric_limits<std::int64_t>::max() - b) return std::numeric_limits<std::int64_t>::max();
  if (b < 0 && a < std::numeric_limits<std::int64_t>::min() - b) return std::numeric_limits<std::int64_t>::min();
  return a + b;
}

inline std::int64_t strict_between(const Constraint& c, std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  std::int64_t n = 0;
  for (std::size_t i = a; i < b; ++i) n += c.ops[i] == CompareOp::Lt ? 1 : 0;
  return n;
}

inline bool refers_to(const Atom& atom, const VarKey& target) {
  const auto* ref = std::get_if<VarRef>(&atom);
  return ref && ref->name == target.name && ref->indexed == target.index.has_value();
}

/// Known values of `atom` relative to a binding of `target`; `want_max`
/// picks the extreme when an indexed atom ranges over several instances.
inline std::optional<std::int64_t> known_value(const Atom& atom, const VarKey& target, const Assignment& a,
                                               bool want_max) {
  if (const auto* lit = std::get_if<IntLiteral>(&atom)) return lit->value;
  const auto& ref = std::get<VarRef>(atom);
  if (!ref.indexed) return a.get(VarKey{ref.name, std::nullopt});
  if (target.index) return a.get(VarKey{ref.name, target.index});
  const auto* slots = a.slots(ref.name);
  if (!slots || slots->indexed.empty()) return std::nullopt;
  std::optional<std::int64_t> best;
  for (const auto& [_, v] : slots->indexed)
    if (!best || (want_max ? v > *best : v < *best)) best = v;
  return best;
}

}  // namespace detail

/// Interval of values `target` may take given the constraints and the values
/// already bound. Every known atom on either side of the target in a chain
/// contributes a bound ("<" tightens by one per strict step); unknown atoms
/// contribute nothing now and are checked when they are bound. Sides with no
/// bound fall back to `default_range`.
inline Interval feasible_interval(const std::vector<Constraint>& constraints, const VarKey& target,
                                  const Assignment& assignment, Interval default_range = kDefaultRange) {
  std::optional<std::int64_t> lo, hi;
  for (const auto& c : constraints) {
    for (std::size_t p = 0; p < c.atoms.size(); ++p) {
      if (!detail::refers_to(c.atoms[p], target)) continue;
      for (std::size_t q = 0; q < c.atoms.size(); ++q) {
        if (q == p || detail::refers_to(c.atoms[q], target)) continue;
        const bool left = q < p;
        auto v = detail::known_value(c.atoms[q], target, assignment, left);
        if (!v) continue;
        const std::int64_t strict = detail::strict_between(c, p, q);
        if (left) {
          const std::int64_t b = detail::sat_add(*v, strict);
          lo = lo ? std::max(*lo, b) : b;
        } else {
          const std::int64_t b = detail::sat_add(*v, -strict);
          hi = hi ? std::min(*hi, b) : b;
        }
      }
    }
  }
  return Interval{lo.value_or(default_range.lo), hi.value_or(default_range.hi)};
}

/// Checks every chain over all bound instances (indexed atoms in one chain
/// share their index). Pairs with an unbound side are skipped. Returns a
/// description of the first violation, or nullopt.
inline std::optional<std::string> find_violation(const std::vector<Constraint>& constraints,
                                                 const Assignment& assignment) {
  for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
    const auto& c = constraints[ci];
    std::vector<std::optional<std::int64_t>> indices;
    bool any_indexed = false;
    for (const auto& atom : c.atoms) {
      const auto* ref = std::get_if<VarRef>(&atom);
      if (!ref || !ref->indexed) continue;
      any_indexed = true;
      if (const auto* slots = assignment.slots(ref->name))
        for (const auto& [j, _] : slots->indexed) indices.emplace_back(j);
    }
    if (!any_indexed) indices.emplace_back(std::nullopt);
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    for (const auto& j : indices) {
      std::vector<std::optional<std::int64_t>> vals;
      for (const auto& atom : c.atoms) {
        if (const auto* lit = std::get_if<IntLiteral>(&atom)) {
          vals.emplace_back(lit->value);
        } else {
          const auto& ref = std::get<VarRef>(atom);
          vals.push_back(assignment.get(VarKey{ref.name, ref.indexed ? j : std::nullopt}));
        }
      }
      for (std::size_t p = 0; p < vals.size(); ++p) {
        for (std::size_t q = p + 1; q < vals.size(); ++q) {
          if (!vals[p] || !vals[q]) continue;
          if (detail::sat_add(*vals[p], detail::strict_between(c, p, q)) > *vals[q]) {
            std::string where = j ? " at index " + std::to_string(*j) : "";
            return "constraint " + std::to_string(ci) + " '" + render_constraint(c) + "' violated" + where;
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace ccfg
