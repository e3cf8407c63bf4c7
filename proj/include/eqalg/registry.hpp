#ifndef EQALG_REGISTRY_HPP
#define EQALG_REGISTRY_HPP

// Named constructions, each paired with the oracle that checks it.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqalg/constructions.hpp"
#include "eqalg/eval.hpp"
#include "eqalg/oracle.hpp"
#include "eqalg/parser.hpp"

namespace eqalg::constructions {

struct ConstructionOutcome {
  std::string expression;
  Relation result{flat_type(1)};
  std::string summary;
  EvalMetrics metrics;
  bool verified = false;
  bool pass = false;
  std::string oracle;  ///< what the result was compared against, and how it went
};

struct Construction {
  std::string name;
  std::string description;
  Schema schema;  ///< relations the database must provide
  std::function<Expr()> expression;
  std::function<ConstructionOutcome(const Database&, const EvalBudget&, bool verify)> run;
};

namespace detail {

inline std::string count_summary(const Relation& r) {
  if (r.empty()) return "no solution";
  return std::to_string(r.size()) + (r.size() == 1 ? " solution" : " solutions");
}

inline const Relation& input(const Database& db, const char* name) {
  const Relation* r = db.find(name);
  if (!r) throw ModelError(std::string("the database has no relation ") + name);
  return *r;
}

inline void compare(ConstructionOutcome& out, bool equal, const std::string& oracle) {
  out.verified = true;
  out.pass = equal;
  out.oracle = oracle + (equal ? ": match" : ": MISMATCH");
}

/// Evaluates the construction's expression and fills the common fields.
inline ConstructionOutcome evaluate_outcome(const Expr& e, const Database& db, const EvalBudget& budget,
                                            bool solutions) {
  ConstructionOutcome out;
  out.expression = render_expr(e);
  auto r = evaluate(e, db, budget);
  out.result = r.value;
  out.metrics = r.metrics;
  out.summary = solutions ? count_summary(r.value) : std::to_string(r.value.size()) + " tuples";
  return out;
}

inline oracle::OSet singletons(const Database& db) {
  oracle::OSet out;
  for (auto a : db.domain()) out.insert({oracle::OValue::of_set({{oracle::OValue::of_atom(a.str())}})});
  return out;
}

}  // namespace detail

inline const std::vector<Construction>& registry() {
  static const std::vector<Construction> all = [] {
    std::vector<Construction> v;
    const Schema none;
    const Schema unary{{"R", flat_type(1)}};
    const Schema binary{{"R", flat_type(2)}};

    v.push_back({"parity", "X:(0,0) pairing every element with a partner; solvable iff |D| is even", none,
                 [] { return build_parity_eq().as_solve(); },
                 [](const Database& db, const EvalBudget& b, bool verify) {
                   auto out = detail::evaluate_outcome(build_parity_eq().as_solve(), db, b, true);
                   if (verify) {
                     auto expected = oracle::parity_solution_count(db.domain().size());
                     detail::compare(out, out.result.size() == expected,
                                     "direct matching count " + std::to_string(expected));
                   }
                   return out;
                 }});

    v.push_back({"singleton", "X:(0) holding exactly one element", none,
                 [] { return build_singleton_eq().as_solve(); },
                 [](const Database& db, const EvalBudget& b, bool verify) {
                   auto out = detail::evaluate_outcome(build_singleton_eq().as_solve(), db, b, true);
                   if (verify)
                     detail::compare(out, oracle::from_relation(out.result) == detail::singletons(db),
                                     "the singleton subsets of D");
                   return out;
                 }});

    v.push_back({"powerset", "{(X) | union(X,R) = R}: all subsets of R", unary, [] { return build_powerset_eq(); },
                 [](const Database& db, const EvalBudget& b, bool verify) {
                   auto out = detail::evaluate_outcome(build_powerset_eq(), db, b, true);
                   if (verify)
                     detail::compare(out,
                                     oracle::from_relation(out.result) ==
                                         oracle::o_powerset(oracle::from_relation(detail::input(db, "R"))),
                                     "subset enumeration of R");
                   return out;
                 }});

    v.push_back({"powerset-of-powerset", "all sets of subsets of R, by nesting the powerset equation", unary,
                 [] { return build_powerset_of_powerset_eq(); },
                 [](const Database& db, const EvalBudget& b, bool verify) {
                   auto out = detail::evaluate_outcome(build_powerset_of_powerset_eq(), db, b, true);
                   if (verify)
                     detail::compare(out,
                                     oracle::from_relation(out.result) ==
                                         oracle::o_powerset(
                                             oracle::o_powerset(oracle::from_relation(detail::input(db, "R")))),
                                     "subset enumeration applied twice");
                   return out;
                 }});

    v.push_back({"tc-powerset", "transitive closure as the least closed superset of R", binary,
                 [] { return build_tc_powerset_expr(); },
                 [](const Database& db, const EvalBudget& b, bool verify) {
                   auto out = detail::evaluate_outcome(build_tc_powerset_expr(), db, b, false);
                   if (verify)
                     detail::compare(out, out.result == oracle::warshall_tc(detail::input(db, "R")), "warshall_tc");
                   return out;
                 }});

    v.push_back({"tc-sparse", "transitive closure through the unique solution Run of a sparse equation", binary,
                 [] { return build_tc_sparse_expr(); },
                 [](const Database& db, const EvalBudget& b, bool verify) {
                   ConstructionOutcome out;
                   out.expression = render_expr(build_tc_sparse_expr());
                   auto check = tc_sparse_harness(db, b);
                   out.result = check.closure;
                   out.metrics = check.metrics;
                   out.summary = "Run has " + std::to_string(check.run.size()) + " tuples and " +
                                 (check.run_satisfies ? "solves" : "does NOT solve") + " the equation; closure has " +
                                 std::to_string(check.closure.size()) + " tuples";
                   if (verify)
                     detail::compare(out,
                                     check.run_satisfies && check.closure == oracle::warshall_tc(detail::input(db, "R")),
                                     "warshall_tc");
                   return out;
                 }});

    v.push_back({"nest-sparse", "nest[2](R) computed without the nest operator", binary,
                 [] { return build_nest_sparse_expr(); },
                 [](const Database& db, const EvalBudget& b, bool verify) {
                   auto out = detail::evaluate_outcome(build_nest_sparse_expr(), db, b, false);
                   if (verify) detail::compare(out, out.result == op_nest(detail::input(db, "R"), {2}), "op_nest");
                   return out;
                 }});
    return v;
  }();
  return all;
}

inline const Construction* find_construction(std::string_view name) {
  for (const auto& c : registry())
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace eqalg::constructions

#endif  // EQALG_REGISTRY_HPP
