#ifndef EQALG_ORACLE_HPP
#define EQALG_ORACLE_HPP

// Reference implementations used to cross-check the evaluator and the
// constructions. Nothing here calls into operators.hpp or eval.hpp: values
// are converted to plain std::set trees and every operator is written
// directly from its set-comprehension definition.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eqalg/ast.hpp"
#include "eqalg/model.hpp"

namespace eqalg::oracle {

struct OValue;
using OTuple = std::vector<OValue>;

struct OTupleLess {
  bool operator()(const OTuple& a, const OTuple& b) const;
};

using OSet = std::set<OTuple, OTupleLess>;

/// Atom or set of tuples.
struct OValue {
  std::optional<std::string> atom;
  std::shared_ptr<const OSet> set;

  static OValue of_atom(std::string s) { return {std::move(s), nullptr}; }
  static OValue of_set(OSet s) { return {std::nullopt, std::make_shared<const OSet>(std::move(s))}; }
};

inline bool operator<(const OValue& a, const OValue& b) {
  if (a.atom && b.atom) return *a.atom < *b.atom;
  if (a.atom || b.atom) return bool(a.atom);
  return std::lexicographical_compare(a.set->begin(), a.set->end(), b.set->begin(), b.set->end(), OTupleLess{});
}
inline bool operator==(const OValue& a, const OValue& b) { return !(a < b) && !(b < a); }

inline bool OTupleLess::operator()(const OTuple& a, const OTuple& b) const {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline OValue from_value(const Value& v) {
  if (v.is_atom()) return OValue::of_atom(v.atom().str());
  OSet s;
  for (auto t : v.relation()) {
    OTuple ot;
    for (const auto& c : t) ot.push_back(from_value(c));
    s.insert(std::move(ot));
  }
  return OValue::of_set(std::move(s));
}

inline OSet from_relation(const Relation& r) { return *from_value(r).set; }

//---------------------------------------------------------------------------
// Operators by comprehension
//---------------------------------------------------------------------------

inline OSet o_union(const OSet& a, const OSet& b) {
  OSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline OSet o_difference(const OSet& a, const OSet& b) {
  OSet out;
  for (const auto& t : a)
    if (!b.count(t)) out.insert(t);
  return out;
}

inline OSet o_product(const OSet& a, const OSet& b) {
  OSet out;
  for (const auto& x : a)
    for (const auto& y : b) {
      OTuple t = x;
      t.insert(t.end(), y.begin(), y.end());
      out.insert(std::move(t));
    }
  return out;
}

inline OSet o_project(const OSet& r, const std::vector<std::size_t>& cols) {
  OSet out;
  for (const auto& x : r) {
    OTuple t;
    for (auto c : cols) t.push_back(x[c - 1]);
    out.insert(std::move(t));
  }
  return out;
}

inline OSet o_select(const OSet& r, std::size_t i, bool equal, std::size_t j) {
  OSet out;
  for (const auto& x : r)
    if ((x[i - 1] == x[j - 1]) == equal) out.insert(x);
  return out;
}

/// { (x, {(y_i1..y_ip) | y in R, x_j = y_j for j outside cols}) | x in R }
inline OSet o_nest(const OSet& r, const std::vector<std::size_t>& cols) {
  OSet out;
  for (const auto& x : r) {
    OSet group;
    for (const auto& y : r) {
      bool agree = true;
      for (std::size_t j = 1; j <= x.size(); ++j)
        if (std::find(cols.begin(), cols.end(), j) == cols.end() && !(x[j - 1] == y[j - 1])) agree = false;
      if (!agree) continue;
      OTuple sub;
      for (auto c : cols) sub.push_back(y[c - 1]);
      group.insert(std::move(sub));
    }
    OTuple t = x;
    t.push_back(OValue::of_set(std::move(group)));
    out.insert(std::move(t));
  }
  return out;
}

/// { (x, y) | x in R, y in x_i }
inline OSet o_unnest(const OSet& r, std::size_t i) {
  OSet out;
  for (const auto& x : r)
    for (const auto& y : *x[i - 1].set) {
      OTuple t = x;
      t.insert(t.end(), y.begin(), y.end());
      out.insert(std::move(t));
    }
  return out;
}

/// { (S) | S subset of R }
inline OSet o_powerset(const OSet& r) {
  std::vector<OTuple> items(r.begin(), r.end());
  OSet out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << items.size()); ++mask) {
    OSet s;
    for (std::size_t k = 0; k < items.size(); ++k)
      if (mask >> k & 1) s.insert(items[k]);
    out.insert({OValue::of_set(std::move(s))});
  }
  return out;
}

inline OSet o_domain(const std::vector<Atom>& domain) {
  OSet out;
  for (auto a : domain) out.insert({OValue::of_atom(a.str())});
  return out;
}

/// Every relation of a flat or nested type, by recursion on subsets of the
/// tuple universe.
inline std::vector<OSet> o_all_relations(const RelationType& type, const std::vector<Atom>& domain) {
  std::vector<std::vector<OValue>> choices;
  for (const auto& c : type.components()) {
    std::vector<OValue> opts;
    if (c.is_atom()) {
      for (auto a : domain) opts.push_back(OValue::of_atom(a.str()));
    } else {
      for (auto& s : o_all_relations(c, domain)) opts.push_back(OValue::of_set(std::move(s)));
    }
    choices.push_back(std::move(opts));
  }
  std::vector<OTuple> universe{{}};
  for (const auto& opts : choices) {
    std::vector<OTuple> next;
    for (const auto& prefix : universe)
      for (const auto& o : opts) {
        OTuple t = prefix;
        t.push_back(o);
        next.push_back(std::move(t));
      }
    universe = std::move(next);
  }
  std::vector<OSet> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << universe.size()); ++mask) {
    OSet s;
    for (std::size_t k = 0; k < universe.size(); ++k)
      if (mask >> k & 1) s.insert(universe[k]);
    out.push_back(std::move(s));
  }
  return out;
}

/// Evaluates an expression by comprehension, including solve nodes by
/// filtering every candidate assignment.
inline OSet o_eval(const Expr& e, const std::vector<Atom>& domain, std::map<std::string, OSet>& env) {
  auto sub = [&](std::size_t i) { return o_eval(e.operand(i), domain, env); };
  switch (e.op()) {
    case Op::name: return env.at(e.name());
    case Op::domain: return o_domain(domain);
    case Op::union_: return o_union(sub(0), sub(1));
    case Op::difference: return o_difference(sub(0), sub(1));
    case Op::product: return o_product(sub(0), sub(1));
    case Op::project: return o_project(sub(0), e.columns());
    case Op::select: return o_select(sub(0), e.columns()[0], e.comparison() == Comparison::eq, e.columns()[1]);
    case Op::nest: return o_nest(sub(0), e.columns());
    case Op::unnest: return o_unnest(sub(0), e.columns()[0]);
    case Op::powerset: return o_powerset(sub(0));
    case Op::solve: {
      const auto& binders = e.binders();
      std::vector<std::vector<OSet>> spaces;
      for (const auto& b : binders) spaces.push_back(o_all_relations(b.type, domain));
      std::vector<std::size_t> digit(binders.size(), 0);
      OSet out;
      while (true) {
        for (std::size_t i = 0; i < binders.size(); ++i) env[binders[i].name] = spaces[i][digit[i]];
        if (sub(0) == sub(1)) {
          OTuple t;
          for (std::size_t i = 0; i < binders.size(); ++i) t.push_back(OValue::of_set(spaces[i][digit[i]]));
          out.insert(std::move(t));
        }
        std::size_t pos = 0;
        while (pos < digit.size() && ++digit[pos] == spaces[pos].size()) digit[pos++] = 0;
        if (pos == digit.size()) break;
      }
      for (const auto& b : binders) env.erase(b.name);
      return out;
    }
  }
  return {};
}

inline OSet o_eval(const Expr& e, const Database& db) {
  std::map<std::string, OSet> env;
  for (const auto& [name, rel] : db.relations()) env.emplace(name, from_relation(rel));
  return o_eval(e, db.domain(), env);
}

//---------------------------------------------------------------------------
// Construction oracles
//---------------------------------------------------------------------------

using Pair = std::pair<std::string, std::string>;

inline std::set<Pair> to_pairs(const Relation& r) {
  std::set<Pair> out;
  for (auto t : r) out.emplace(t[0].atom().str(), t[1].atom().str());
  return out;
}

inline Relation from_pairs(const std::set<Pair>& pairs) {
  std::vector<std::vector<Value>> tuples;
  for (const auto& [a, b] : pairs) tuples.push_back({Atom(a), Atom(b)});
  return Relation::from_tuples(flat_type(2), tuples);
}

/// Transitive closure by repeated one-step extension until nothing changes.
inline Relation warshall_tc(const Relation& r) {
  std::set<Pair> closure = to_pairs(r);
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<Pair> added;
    for (const auto& [a, b] : closure)
      for (const auto& [c, d] : closure)
        if (b == c && !closure.count({a, d})) added.emplace(a, d);
    if (!added.empty()) {
      closure.insert(added.begin(), added.end());
      changed = true;
    }
  }
  return from_pairs(closure);
}

/// Number of X within DxD that are one-to-one, have disjoint projections,
/// and cover the domain: every candidate is checked directly.
inline std::uint64_t parity_solution_count(std::size_t n) {
  const std::size_t cells = n * n;
  std::uint64_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
    std::vector<int> out_deg(n, 0), in_deg(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < cells; ++k)
      if (mask >> k & 1) pairs.emplace_back(k / n, k % n);
    bool ok = true;
    for (auto [a, b] : pairs) {
      ++out_deg[a];
      ++in_deg[b];
    }
    for (std::size_t v = 0; v < n && ok; ++v) {
      // Each element is a source exactly once or a target exactly once, never both.
      if (out_deg[v] > 1 || in_deg[v] > 1) ok = false;
      if (out_deg[v] + in_deg[v] != 1) ok = false;
    }
    if (ok) ++count;
  }
  return count;
}

}  // namespace eqalg::oracle

#endif  // EQALG_ORACLE_HPP
