#ifndef EQALG_TYPECHECK_HPP
#define EQALG_TYPECHECK_HPP

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eqalg/ast.hpp"
#include "eqalg/error.hpp"
#include "eqalg/model.hpp"

namespace eqalg {

namespace detail {

inline std::string describe(const Expr& e, const std::string& path) {
  return path + " (" + op_keyword(e.op()) + ")";
}

inline void check_column(const Expr& e, const std::string& path, std::size_t col, const RelationType& t) {
  if (col < 1 || col > t.arity())
    throw TypeError(describe(e, path), "column " + std::to_string(col) + " out of range for type " + to_string(t));
}

/// Extends a schema with solve binders for the lifetime of the guard.
class ScopedBinders {
 public:
  ScopedBinders(Schema& schema, const std::vector<Binder>& binders) : schema_(schema) {
    for (const auto& b : binders) {
      auto it = schema_.find(b.name);
      saved_.emplace_back(b.name, it == schema_.end() ? std::nullopt : std::optional(it->second));
      schema_.insert_or_assign(b.name, b.type);
    }
  }
  ~ScopedBinders() {
    for (auto& [name, old] : saved_) {
      if (old)
        schema_.insert_or_assign(name, *old);
      else
        schema_.erase(name);
    }
  }
  ScopedBinders(const ScopedBinders&) = delete;
  ScopedBinders& operator=(const ScopedBinders&) = delete;

 private:
  Schema& schema_;
  std::vector<std::pair<std::string, std::optional<RelationType>>> saved_;
};

inline RelationType infer(const Expr& e, Schema& schema, const std::string& path) {
  auto operand = [&](std::size_t i) { return infer(e.operand(i), schema, child_path(path, i)); };
  switch (e.op()) {
    case Op::name: {
      auto it = schema.find(e.name());
      if (it == schema.end()) throw TypeError(describe(e, path), "unknown relation name " + e.name());
      return it->second;
    }
    case Op::domain: return flat_type(1);
    case Op::union_:
    case Op::difference: {
      auto a = operand(0), b = operand(1);
      if (!(a == b))
        throw TypeError(describe(e, path), "operand types differ: " + to_string(a) + " vs " + to_string(b));
      return a;
    }
    case Op::product: {
      auto a = operand(0), b = operand(1);
      std::vector<RelationType> comps(a.components().begin(), a.components().end());
      comps.insert(comps.end(), b.components().begin(), b.components().end());
      return RelationType::tuple(std::move(comps));
    }
    case Op::project: {
      auto t = operand(0);
      std::vector<RelationType> comps;
      for (auto c : e.columns()) {
        check_column(e, path, c, t);
        comps.push_back(t[c - 1]);
      }
      return RelationType::tuple(std::move(comps));
    }
    case Op::select: {
      auto t = operand(0);
      auto i = e.columns()[0], j = e.columns()[1];
      check_column(e, path, i, t);
      check_column(e, path, j, t);
      if (!(t[i - 1] == t[j - 1]))
        throw TypeError(describe(e, path), "compared columns have different types " + to_string(t[i - 1]) +
                                               " and " + to_string(t[j - 1]));
      return t;
    }
    case Op::nest: {
      auto t = operand(0);
      std::vector<RelationType> nested;
      for (auto c : e.columns()) {
        check_column(e, path, c, t);
        nested.push_back(t[c - 1]);
      }
      std::vector<RelationType> comps(t.components().begin(), t.components().end());
      comps.push_back(RelationType::tuple(std::move(nested)));
      return RelationType::tuple(std::move(comps));
    }
    case Op::unnest: {
      auto t = operand(0);
      auto i = e.columns()[0];
      check_column(e, path, i, t);
      if (t[i - 1].is_atom())
        throw TypeError(describe(e, path), "column " + std::to_string(i) + " holds atoms and cannot be unnested");
      std::vector<RelationType> comps(t.components().begin(), t.components().end());
      for (const auto& c : t[i - 1].components()) comps.push_back(c);
      return RelationType::tuple(std::move(comps));
    }
    case Op::powerset: return RelationType::tuple({operand(0)});
    case Op::solve: {
      ScopedBinders scope(schema, e.binders());
      auto a = operand(0), b = operand(1);
      if (!(a == b))
        throw TypeError(describe(e, path),
                        "equation sides have different types " + to_string(a) + " and " + to_string(b));
      std::vector<RelationType> comps;
      for (const auto& binder : e.binders()) comps.push_back(binder.type);
      return RelationType::tuple(std::move(comps));
    }
  }
  throw InternalError("unhandled operator");
}

}  // namespace detail

/// Relation type of `e` over `schema` (extended with solve binders inside
/// solve nodes). Throws TypeError naming the offending node.
inline RelationType infer_type(const Expr& e, const Schema& schema) {
  Schema scratch = schema;
  return detail::infer(e, scratch, "$");
}

/// e1 = e2  becomes  D - project[1](times(D, e1 delta e2)) != empty,
/// after checking that both sides have the same type over `schema`.
inline Disequation rewrite_eq_to_diseq(const Expr& lhs, const Expr& rhs, const Schema& schema) {
  auto a = infer_type(lhs, schema), b = infer_type(rhs, schema);
  if (!(a == b))
    throw TypeError("$", "equation sides have different types " + to_string(a) + " and " + to_string(b));
  return rewrite_eq_to_diseq_unchecked(lhs, rhs);
}

struct DatabaseReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks that `db` conforms to `schema` exactly: same names, same types,
/// atoms drawn from a non-empty domain.
inline DatabaseReport typecheck_database(const Database& db, const Schema& schema) {
  DatabaseReport report;
  if (db.domain().empty()) report.violations.push_back("domain is empty");
  for (const auto& [name, type] : schema) {
    if (type.is_atom()) report.violations.push_back("schema gives " + name + " the atom type 0");
    const Relation* rel = db.find(name);
    if (!rel) {
      report.violations.push_back("relation " + name + " is missing from the database");
      continue;
    }
    if (!(rel->type() == type))
      report.violations.push_back("relation " + name + " has type " + to_string(rel->type()) + ", schema says " +
                                  to_string(type));
  }
  for (const auto& [name, rel] : db.relations())
    if (!schema.count(name)) report.violations.push_back("relation " + name + " is not in the schema");

  std::function<void(const std::string&, const Relation&)> atoms = [&](const std::string& name, const Relation& r) {
    for (const Value& v : r.cells()) {
      if (v.is_atom()) {
        if (!std::binary_search(db.domain().begin(), db.domain().end(), v.atom()))
          report.violations.push_back("relation " + name + " mentions atom " + v.atom().str() +
                                      " outside the domain");
      } else {
        atoms(name, v.relation());
      }
    }
  };
  for (const auto& [name, rel] : db.relations()) atoms(name, rel);
  return report;
}

}  // namespace eqalg

#endif  // EQALG_TYPECHECK_HPP
