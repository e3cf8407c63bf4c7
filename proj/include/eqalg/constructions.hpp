#ifndef EQALG_CONSTRUCTIONS_HPP
#define EQALG_CONSTRUCTIONS_HPP

// Concrete equations and expressions: powerset, parity, singleton,
// transitive closure (through powerset-style enumeration and through the
// sparse Run relation), and nesting without the nest operator.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eqalg/ast.hpp"
#include "eqalg/error.hpp"
#include "eqalg/eval.hpp"
#include "eqalg/model.hpp"
#include "eqalg/operators.hpp"

namespace eqalg::constructions {

using namespace eqalg::expr;

/// Variables plus the two sides of an equation.
struct EquationSpec {
  std::vector<Binder> vars;
  Expr lhs;
  Expr rhs;

  Expr as_solve() const { return solve(vars, lhs, rhs); }
};

namespace detail {

inline void require_flat_binary(const Relation& r, const char* what) {
  if (r.arity() != 2 || !r.type().is_flat())
    throw ModelError(std::string(what) + ": expected a flat binary relation, got type " + to_string(r.type()));
}

/// Union of the violation witnesses, each squeezed to a unary relation that
/// is D when the witness is non-empty and empty otherwise.
inline Expr any_nonempty(const std::vector<Expr>& witnesses) {
  auto flag = [](const Expr& w) { return project({1}, times(dom(), w)); };
  Expr out = flag(witnesses.at(0));
  for (std::size_t i = 1; i < witnesses.size(); ++i) out = unite(out, flag(witnesses[i]));
  return out;
}

inline Expr empty_unary() { return minus(dom(), dom()); }

inline Expr intersect(const Expr& a, const Expr& b) { return minus(a, minus(a, b)); }

}  // namespace detail

//---------------------------------------------------------------------------
// Composition and powers
//---------------------------------------------------------------------------

/// project[1,4](select[2=3](times(s, t)))
inline Expr compose_expr(Expr s, Expr t) { return project({1, 4}, select_eq(2, 3, times(std::move(s), std::move(t)))); }

inline Relation compose(const Relation& s, const Relation& t) {
  detail::require_flat_binary(s, "compose");
  detail::require_flat_binary(t, "compose");
  return op_project(op_select(op_product(s, t), 2, Comparison::eq, 3), {1, 4});
}

/// R^i, R^{<=i} and R^{=i} = R^i - R^{<=i-1}.
struct PowerLevel {
  Relation power;
  Relation upto;
  Relation exact;
};

struct PowerTable {
  Relation base;
  /// levels[i - 1] describes exponent i, for i = 1..|R|+1.
  std::vector<PowerLevel> levels;

  const PowerLevel& level(std::size_t i) const { return levels.at(i - 1); }
  Relation closure() const { return level(levels.size() > 1 ? levels.size() - 1 : 1).upto; }
};

inline PowerTable build_power_table(const Relation& r) {
  detail::require_flat_binary(r, "build_power_table");
  PowerTable table{r, {}};
  table.levels.push_back({r, r, r});
  for (std::size_t i = 2; i <= r.size() + 1; ++i) {
    const PowerLevel& prev = table.levels.back();
    Relation power = compose(prev.power, r);
    Relation exact = op_difference(power, prev.upto);
    Relation upto = op_union(prev.upto, power);
    table.levels.push_back({std::move(power), std::move(upto), std::move(exact)});
  }
  return table;
}

/// Union over i = 1..|R| of R^{<=i} x R^{<=i+1} x R^{=i+1}.
inline Relation build_run(const Relation& r) {
  PowerTable table = build_power_table(r);
  Relation run(flat_type(6));
  for (std::size_t i = 1; i <= r.size(); ++i) {
    const PowerLevel& lo = table.level(i);
    const PowerLevel& hi = table.level(i + 1);
    if (hi.exact.empty()) continue;
    run = op_union(run, op_product(op_product(lo.upto, hi.upto), hi.exact));
  }
  return run;
}

//---------------------------------------------------------------------------
// Sparse transitive closure
//---------------------------------------------------------------------------

/// Violation witnesses for the conditions that pin X down to build_run(R).
///
/// A row (a,b,c,d,p,q) of X reads: under key k = (p,q), the pair (a,b) is in
/// the "hat" section and (c,d) in the "check" section. Each witness is
/// non-empty exactly when its condition fails.
struct RunCondition {
  std::string label;
  Expr witness;
};

inline std::vector<RunCondition> run_conditions() {
  const Expr X = rel("X"), R = rel("R");
  const Expr K = project({5, 6}, X);
  const Expr hat = project({5, 6, 1, 2}, X);
  const Expr chk = project({5, 6, 3, 4}, X);
  // (p, q, section) with the section nested as a binary relation.
  const Expr hat_n = project({1, 2, 5}, nest({3, 4}, hat));
  const Expr chk_n = project({1, 2, 5}, nest({3, 4}, chk));
  const Expr r_n = project({3}, nest({1, 2}, R));

  std::vector<RunCondition> w;

  // Every key's rows form the full product of its hat and check sections:
  // each (a,b,p,q) sees the same set of (c,d) as the key's check section.
  const Expr rows_n = project({5, 6, 1, 2, 7}, nest({3, 4}, X));
  w.push_back({"rows are hat x check", select_ne(5, 8, select_eq(2, 7, select_eq(1, 6, times(rows_n, chk_n))))});

  w.push_back({"hat contains R", minus(times(K, R), hat)});

  const Expr hat_step = project({1, 2, 3, 6}, select_eq(4, 5, times(hat, R)));
  w.push_back({"check = hat + hat.R", symmetric_difference(chk, unite(hat, hat_step))});

  const Expr diag = project({1, 2, 1, 2}, K);
  w.push_back({"key in check, not in hat", unite(minus(diag, chk), detail::intersect(diag, hat))});

  const Expr fresh = minus(chk, hat);
  w.push_back({"check - hat are keys", minus(project({3, 4}, fresh), K)});
  const Expr fresh_hat = project({1, 2, 3, 4, 7}, select_eq(2, 6, select_eq(1, 5, times(fresh, hat_n))));
  w.push_back({"check - hat share the hat", select_ne(5, 8, select_eq(4, 7, select_eq(3, 6, times(fresh_hat, hat_n))))});

  const Expr two_step = minus(compose_expr(R, R), R);
  const Expr hat_is_r = project({1, 2}, select_eq(3, 4, times(hat_n, r_n)));
  const Expr hat_not_r = minus(K, hat_is_r);
  w.push_back({"two-step pairs are keys", minus(two_step, K)});
  w.push_back({"two-step keys have hat R", detail::intersect(two_step, hat_not_r)});

  const Expr chk_step = project({1, 2, 3, 6}, select_eq(4, 5, times(chk, R)));
  const Expr growing = project({1, 2}, minus(chk_step, chk));
  w.push_back({"open check is a hat", minus(growing, project({1, 2}, select_eq(3, 6, times(chk_n, hat_n))))});

  w.push_back({"hat other than R is a check", minus(hat_not_r, project({1, 2}, select_eq(3, 6, times(hat_n, chk_n))))});
  return w;
}

/// The equation on X (six atom columns) whose unique solution, given a
/// binary R, is build_run(R): the union of the condition witnesses, each
/// squeezed to a unary flag, equated to the empty relation.
inline EquationSpec build_run_equation() {
  std::vector<Expr> witnesses;
  for (auto& c : run_conditions()) witnesses.push_back(c.witness);
  return {{{"X", flat_type(6)}}, detail::any_nonempty(witnesses), detail::empty_unary()};
}

/// Middle column pair of the unnested Run solutions, together with R.
inline Expr tc_sparse_pipeline(Expr solutions) { return unite(project({4, 5}, unnest(1, std::move(solutions))), rel("R")); }

inline Expr build_tc_sparse_expr() { return tc_sparse_pipeline(build_run_equation().as_solve()); }

inline constexpr const char* kRunSolutionsName = "RunSolutions";

/// Evaluates both sides of `eq` with the variables fixed to `assignment`.
inline bool satisfies(const EquationSpec& eq, const Database& db, const std::map<std::string, Relation>& assignment,
                      const EvalBudget& budget = {}) {
  Database extended = db;
  for (const auto& [name, r] : assignment) extended = extended.with_relation(name, r);
  return evaluate(eq.lhs, extended, budget).value == evaluate(eq.rhs, extended, budget).value;
}

struct SparseTcCheck {
  Relation run;
  bool run_satisfies = false;
  Relation closure;
  EvalMetrics metrics;
};

/// Supplies build_run(R) as the candidate, confirms that it solves the Run
/// equation, and runs the downstream pipeline on {(Run)}.
inline SparseTcCheck tc_sparse_harness(const Database& db, const EvalBudget& budget = {}) {
  const Relation* r = db.find("R");
  if (!r) throw ModelError("tc-sparse: database has no relation R");
  detail::require_flat_binary(*r, "tc-sparse");
  SparseTcCheck out{build_run(*r), false, Relation(flat_type(2)), {}};
  out.run_satisfies = satisfies(build_run_equation(), db, {{"X", out.run}}, budget);
  Relation solutions = Relation::from_tuples(RelationType::tuple({flat_type(6)}), {{Value(out.run)}});
  auto result = evaluate(tc_sparse_pipeline(rel(kRunSolutionsName)), db.with_relation(kRunSolutionsName, solutions), budget);
  out.closure = result.value;
  out.metrics = result.metrics;
  return out;
}

//---------------------------------------------------------------------------
// Transitive closure through all transitively closed supersets
//---------------------------------------------------------------------------

/// Non-empty iff T is not transitively closed or misses part of R.
inline Expr tc_condition(const Expr& T, const Expr& R) { return unite(minus(compose_expr(T, T), T), minus(R, T)); }

/// The inclusion-minimal members of a unary relation W of binary relations.
inline Expr minimal_members(const Expr& W) {
  const Expr pairs = times(W, W);
  // (T', T, a, b) for (a, b) in T' or in T; nesting appends T' union T.
  const Expr joined = nest({3, 4}, unite(unnest(1, pairs), unnest(2, pairs)));
  const Expr proper_sub = select_ne(1, 2, select_eq(2, 5, joined));
  return minus(W, project({2}, proper_sub));
}

inline Expr build_tc_powerset_expr() {
  const Expr T = rel("T"), R = rel("R");
  const Expr closed_supersets = solve({{"T", flat_type(2)}}, tc_condition(T, R), minus(R, R));
  return project({2, 3}, unnest(1, minimal_members(closed_supersets)));
}

//---------------------------------------------------------------------------
// Parity and singleton
//---------------------------------------------------------------------------

/// X is a perfect matching of D into sources and targets; solvable iff |D| is
/// even.
inline EquationSpec build_parity_eq() {
  const Expr X = rel("X");
  const Expr p1 = project({1}, X), p2 = project({2}, X);
  Expr body = project({1}, select_ne(2, 4, select_eq(1, 3, times(X, X))));
  body = unite(body, project({2}, select_eq(2, 4, select_ne(1, 3, times(X, X)))));
  body = unite(body, detail::intersect(p1, p2));
  body = unite(body, minus(dom(), unite(p1, p2)));
  body = unite(body, minus(unite(p1, p2), dom()));
  return {{{"X", flat_type(2)}}, body, detail::empty_unary()};
}

/// Solutions are exactly the singleton subsets of D: the first term catches
/// two distinct elements, the second an empty X.
inline EquationSpec build_singleton_eq() {
  const Expr X = rel("X");
  Expr body = unite(project({1}, select_ne(1, 2, times(X, X))), minus(dom(), project({1}, times(dom(), X))));
  return {{{"X", flat_type(1)}}, body, detail::empty_unary()};
}

//---------------------------------------------------------------------------
// Nesting without nest
//---------------------------------------------------------------------------

/// X is one first-column value x of R (or empty) and Y = {y | (x, y) in R}.
inline EquationSpec build_nest_sparse_eq() {
  const Expr X = rel("X"), Y = rel("Y"), R = rel("R");
  Expr body = unite(project({1}, select_ne(1, 2, times(X, X))), minus(X, project({1}, R)));
  body = unite(body, symmetric_difference(Y, project({3}, select_eq(1, 2, times(X, R)))));
  return {{{"X", flat_type(1)}, {"Y", flat_type(1)}}, body, detail::empty_unary()};
}

/// Per-x rows (X, Y, x) of the unnested solutions.
inline Expr nest_sparse_raw() { return unnest(1, build_nest_sparse_eq().as_solve()); }

/// Unnesting Y in the per-x rows gives (X, Y, x, y) for every (x, y) in R;
/// keeping (x, y, Y) yields the columns of nest[2](R).
inline Expr build_nest_sparse_expr() { return project({3, 4, 2}, unnest(2, nest_sparse_raw())); }

//---------------------------------------------------------------------------
// Powerset
//---------------------------------------------------------------------------

/// {(X) | X union R = R}: every subset of R, with R of type `t`.
inline Expr build_powerset_eq(const RelationType& t = flat_type(1)) {
  return solve({{"X", t}}, unite(rel("X"), rel("R")), rel("R"));
}

/// {(Y) | Y union P = P} where P is the powerset expression above.
inline Expr build_powerset_of_powerset_eq(const RelationType& t = flat_type(1)) {
  const Expr inner = build_powerset_eq(t);
  return solve({{"Y", RelationType::tuple({t})}}, unite(rel("Y"), inner), inner);
}

}  // namespace eqalg::constructions

#endif  // EQALG_CONSTRUCTIONS_HPP
