#ifndef EQALG_OPERATORS_HPP
#define EQALG_OPERATORS_HPP

// The nested relational algebra on canonical relations. Every operator
// takes canonical inputs and returns a canonical result. Column indices
// are 1-based.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "eqalg/ast.hpp"
#include "eqalg/error.hpp"
#include "eqalg/model.hpp"

namespace eqalg {

namespace detail {

inline void require_same_type(const Relation& a, const Relation& b, const char* op) {
  if (!(a.type() == b.type()))
    throw ModelError(std::string(op) + ": operand types differ (" + to_string(a.type()) + " vs " +
                     to_string(b.type()) + ")");
}

inline void require_column(const Relation& r, std::size_t col, const char* op) {
  if (col < 1 || col > r.arity())
    throw ModelError(std::string(op) + ": column " + std::to_string(col) + " out of range for type " +
                     to_string(r.type()));
}

inline void append(std::vector<Value>& cells, std::span<const Value> t) {
  for (const auto& v : t) cells.push_back(v);
}

}  // namespace detail

inline Relation op_union(const Relation& a, const Relation& b) {
  detail::require_same_type(a, b, "union");
  if (b.empty()) return a;
  if (a.empty()) return b;
  std::vector<Value> cells;
  cells.reserve(a.cells().size() + b.cells().size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    auto c = compare_tuples(a.tuple(i), b.tuple(j));
    if (c < 0) {
      detail::append(cells, a.tuple(i++));
    } else if (c > 0) {
      detail::append(cells, b.tuple(j++));
    } else {
      detail::append(cells, a.tuple(i++));
      ++j;
    }
  }
  for (; i < a.size(); ++i) detail::append(cells, a.tuple(i));
  for (; j < b.size(); ++j) detail::append(cells, b.tuple(j));
  return Relation::from_sorted_cells(a.type(), std::move(cells));
}

inline Relation op_difference(const Relation& a, const Relation& b) {
  detail::require_same_type(a, b, "minus");
  if (a.empty() || b.empty()) return a;
  std::vector<Value> cells;
  std::size_t i = 0, j = 0;
  while (i < a.size()) {
    if (j == b.size()) {
      detail::append(cells, a.tuple(i++));
      continue;
    }
    auto c = compare_tuples(a.tuple(i), b.tuple(j));
    if (c < 0) {
      detail::append(cells, a.tuple(i++));
    } else if (c > 0) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return Relation::from_sorted_cells(a.type(), std::move(cells));
}

inline RelationType product_type(const RelationType& a, const RelationType& b) {
  std::vector<RelationType> comps(a.components().begin(), a.components().end());
  comps.insert(comps.end(), b.components().begin(), b.components().end());
  return RelationType::tuple(std::move(comps));
}

inline Relation op_product(const Relation& a, const Relation& b) {
  std::vector<Value> cells;
  cells.reserve(a.size() * b.size() * (a.arity() + b.arity()));
  for (auto ta : a)
    for (auto tb : b) {
      detail::append(cells, ta);
      detail::append(cells, tb);
    }
  // Lexicographic order of the operands carries over to the concatenation.
  return Relation::from_sorted_cells(product_type(a.type(), b.type()), std::move(cells));
}

inline Relation op_project(const Relation& r, const std::vector<std::size_t>& cols) {
  if (cols.empty()) throw ModelError("project: no columns");
  std::vector<RelationType> comps;
  for (auto c : cols) {
    detail::require_column(r, c, "project");
    comps.push_back(r.type()[c - 1]);
  }
  std::vector<Value> cells;
  cells.reserve(r.size() * cols.size());
  for (auto t : r)
    for (auto c : cols) cells.push_back(t[c - 1]);
  return Relation::from_cells(RelationType::tuple(std::move(comps)), std::move(cells));
}

inline Relation op_select(const Relation& r, std::size_t i, Comparison cmp, std::size_t j) {
  detail::require_column(r, i, "select");
  detail::require_column(r, j, "select");
  if (!(r.type()[i - 1] == r.type()[j - 1])) throw ModelError("select: compared columns have different types");
  std::vector<Value> cells;
  for (auto t : r) {
    bool equal = compare(t[i - 1], t[j - 1]) == 0;
    if (equal == (cmp == Comparison::eq)) detail::append(cells, t);
  }
  return Relation::from_sorted_cells(r.type(), std::move(cells));
}

/// Appends to each tuple the set of its projections onto `cols` taken over
/// all tuples that agree with it outside `cols`.
inline Relation op_nest(const Relation& r, const std::vector<std::size_t>& cols) {
  if (cols.empty()) throw ModelError("nest: no columns");
  std::vector<bool> nested_col(r.arity(), false);
  std::vector<RelationType> nested_comps;
  for (auto c : cols) {
    detail::require_column(r, c, "nest");
    nested_col[c - 1] = true;
    nested_comps.push_back(r.type()[c - 1]);
  }
  RelationType nested_type = RelationType::tuple(std::move(nested_comps));
  std::vector<RelationType> out_comps(r.type().components().begin(), r.type().components().end());
  out_comps.push_back(nested_type);
  RelationType out_type = RelationType::tuple(std::move(out_comps));

  auto key_of = [&](std::span<const Value> t) {
    std::vector<Value> key;
    for (std::size_t k = 0; k < t.size(); ++k)
      if (!nested_col[k]) key.push_back(t[k]);
    return key;
  };

  std::map<std::vector<Value>, std::vector<Value>, TupleLess> groups;
  for (auto t : r) {
    auto& members = groups.try_emplace(key_of(t)).first->second;
    for (auto c : cols) members.push_back(t[c - 1]);
  }
  std::map<std::vector<Value>, Relation, TupleLess> sets;
  for (auto& [key, members] : groups) sets.emplace(key, Relation::from_cells(nested_type, std::move(members)));

  std::vector<Value> cells;
  cells.reserve(r.size() * (r.arity() + 1));
  for (auto t : r) {
    detail::append(cells, t);
    cells.emplace_back(sets.at(key_of(t)));
  }
  // The appended column is determined by the tuple itself, so order is kept.
  return Relation::from_sorted_cells(out_type, std::move(cells));
}

/// Pairs each tuple with every member of its i-th (relation-valued)
/// component, keeping that component.
inline Relation op_unnest(const Relation& r, std::size_t i) {
  detail::require_column(r, i, "unnest");
  const RelationType& inner = r.type()[i - 1];
  if (inner.is_atom()) throw ModelError("unnest: column " + std::to_string(i) + " holds atoms");
  RelationType out_type = product_type(r.type(), inner);
  std::vector<Value> cells;
  for (auto t : r) {
    const Relation& members = t[i - 1].relation();
    for (auto m : members) {
      detail::append(cells, t);
      detail::append(cells, m);
    }
  }
  return Relation::from_sorted_cells(out_type, std::move(cells));
}

/// Size in space units of powerset(r), computed without materializing it.
inline BigInt powerset_size_units(const Relation& r) {
  const std::size_t n = r.size();
  if (n == 0) return 1;
  BigInt subsets = BigInt(1) << n;
  return subsets + (subsets >> 1) * r.size_units();
}

/// All subsets of `r`, as a unary relation of relations. Refuses inputs with
/// more than 62 tuples.
inline Relation op_powerset(const Relation& r) {
  const std::size_t n = r.size();
  if (n > 62) throw ModelError("powerset: input with " + std::to_string(n) + " tuples is too large");
  RelationType out_type = RelationType::tuple({r.type()});
  std::vector<Value> subsets;
  subsets.reserve(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<Value> cells;
    for (std::size_t k = 0; k < n; ++k)
      if (mask >> k & 1) detail::append(cells, r.tuple(k));
    subsets.emplace_back(Relation::from_sorted_cells(r.type(), std::move(cells)));
  }
  return Relation::from_cells(out_type, std::move(subsets));
}

}  // namespace eqalg

#endif  // EQALG_OPERATORS_HPP
