#ifndef EQALG_ACCEPTANCE_HPP
#define EQALG_ACCEPTANCE_HPP

// The acceptance checks: each criterion runs a fixed, seeded workload,
// compares against an independent oracle, and reports pass or fail together
// with its wall time against a pinned limit.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eqalg/constructions.hpp"
#include "eqalg/eval.hpp"
#include "eqalg/model.hpp"
#include "eqalg/operators.hpp"
#include "eqalg/oracle.hpp"
#include "eqalg/parser.hpp"
#include "eqalg/profiler.hpp"

namespace eqalg::acceptance {

using Rng = std::mt19937_64;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool correct = false;
  std::string detail;
  double seconds = 0;
  double limit_seconds = 0;

  bool pass() const { return correct && seconds <= limit_seconds; }
};

//---------------------------------------------------------------------------
// Random inputs
//---------------------------------------------------------------------------

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

inline std::vector<Atom> make_domain(std::size_t n) {
  std::vector<Atom> d;
  for (std::size_t i = 0; i < n; ++i) d.emplace_back(std::string(1, static_cast<char>('a' + i)));
  return d;
}

/// A type of nesting depth at most 2: atoms and flat relation components.
inline RelationType random_type(Rng& rng, std::size_t max_arity = 3, double nested_p = 0.3) {
  std::vector<RelationType> comps;
  const std::size_t k = uniform(rng, 1, max_arity);
  for (std::size_t i = 0; i < k; ++i)
    comps.push_back(coin(rng, nested_p) ? flat_type(uniform(rng, 1, 2)) : RelationType::atom());
  return RelationType::tuple(std::move(comps));
}

inline Relation random_relation(Rng& rng, const RelationType& type, const std::vector<Atom>& domain,
                                std::size_t max_tuples = 6) {
  std::vector<std::vector<Value>> tuples;
  const std::size_t count = uniform(rng, 0, max_tuples);
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<Value> row;
    for (const auto& c : type.components()) {
      if (c.is_atom())
        row.emplace_back(domain[uniform(rng, 0, domain.size() - 1)]);
      else
        row.emplace_back(random_relation(rng, c, domain, 3));
    }
    tuples.push_back(std::move(row));
  }
  return Relation::from_tuples(type, tuples);
}

inline Relation random_flat(Rng& rng, std::size_t arity, const std::vector<Atom>& domain, double p) {
  std::vector<std::vector<Value>> tuples;
  std::vector<std::size_t> digit(arity, 0);
  while (true) {
    if (coin(rng, p)) {
      std::vector<Value> row;
      for (auto d : digit) row.emplace_back(domain[d]);
      tuples.push_back(std::move(row));
    }
    std::size_t pos = arity;
    while (pos > 0 && ++digit[pos - 1] == domain.size()) digit[--pos] = 0;
    if (pos == 0) break;
  }
  return Relation::from_tuples(flat_type(arity), tuples);
}

/// Binary relation on `domain` from the bits of `mask` (bit i*n + j is the
/// pair (i, j)).
inline Relation digraph_from_mask(std::uint64_t mask, const std::vector<Atom>& domain) {
  const std::size_t n = domain.size();
  std::vector<std::vector<Value>> tuples;
  for (std::size_t k = 0; k < n * n; ++k)
    if (mask >> k & 1) tuples.push_back({Value(domain[k / n]), Value(domain[k % n])});
  return Relation::from_tuples(flat_type(2), tuples);
}

/// Random well-typed expressions of unary or binary flat type over D, R1:(0),
/// R2:(0,0) and the given variables.
struct ExprGen {
  Rng& rng;
  std::vector<std::string> unary_vars;
  std::vector<std::string> binary_vars;
  bool allow_solve = false;
  int solve_counter = 0;

  Expr leaf(std::size_t arity) {
    std::vector<Expr> opts;
    if (arity == 1) {
      opts = {expr::dom(), expr::rel("R1")};
      for (const auto& v : unary_vars) opts.push_back(expr::rel(v));
    } else {
      opts = {expr::rel("R2"), expr::times(expr::dom(), expr::rel("R1"))};
      for (const auto& v : binary_vars) opts.push_back(expr::rel(v));
    }
    return opts[uniform(rng, 0, opts.size() - 1)];
  }

  Expr unary(int depth) {
    if (depth <= 0) return leaf(1);
    switch (uniform(rng, 0, allow_solve ? 6 : 5)) {
      case 0: return leaf(1);
      case 1: {
        Expr a = unary(depth - 1);
        return expr::unite(a, unary(depth - 1));
      }
      case 2: {
        Expr a = unary(depth - 1);
        return expr::minus(a, unary(depth - 1));
      }
      case 3: return expr::project({uniform(rng, 1, 2)}, binary(depth - 1));
      case 4: {
        Comparison cmp = coin(rng, 0.5) ? Comparison::eq : Comparison::ne;
        return expr::project({1}, expr::select(1, cmp, 2, binary(depth - 1)));
      }
      case 5: return expr::project({4}, expr::unnest(3, expr::nest({2}, binary(depth - 1))));
      default: {
        // project[2](unnest[1](solve{(Y:(0)) | a = b})) over a fresh Y.
        std::string y = "Y" + std::to_string(++solve_counter);
        ExprGen inner{rng, unary_vars, binary_vars, false, 0};
        inner.unary_vars.push_back(y);
        Expr a = inner.unary(depth - 1);
        Expr b = inner.unary(depth - 1);
        return expr::project({2}, expr::unnest(1, expr::solve({{y, flat_type(1)}}, a, b)));
      }
    }
  }

  Expr binary(int depth) {
    if (depth <= 0) return leaf(2);
    switch (uniform(rng, 0, 6)) {
      case 0: return leaf(2);
      case 1: {
        Expr a = binary(depth - 1);
        return expr::unite(a, binary(depth - 1));
      }
      case 2: {
        Expr a = binary(depth - 1);
        return expr::minus(a, binary(depth - 1));
      }
      case 3: {
        Expr a = unary(depth - 1);
        return expr::times(a, unary(depth - 1));
      }
      case 4: {
        Comparison cmp = coin(rng, 0.5) ? Comparison::eq : Comparison::ne;
        return expr::select(1, cmp, 2, binary(depth - 1));
      }
      case 5: return expr::project({2, 1}, binary(depth - 1));
      default: return expr::project({1, 4}, expr::unnest(3, expr::nest({2}, binary(depth - 1))));
    }
  }

  Expr of_arity(std::size_t arity, int depth) { return arity == 1 ? unary(depth) : binary(depth); }
};

inline Value permute_value(const Value& v, const std::map<Atom, Atom>& f) {
  if (v.is_atom()) return Value(f.at(v.atom()));
  const Relation& r = v.relation();
  std::vector<std::vector<Value>> tuples;
  for (auto t : r) {
    std::vector<Value> row;
    for (const auto& c : t) row.push_back(permute_value(c, f));
    tuples.push_back(std::move(row));
  }
  return Value(Relation::from_tuples(r.type(), tuples));
}

inline Relation permute_relation(const Relation& r, const std::map<Atom, Atom>& f) {
  return permute_value(Value(r), f).relation();
}

//---------------------------------------------------------------------------
// Criteria
//---------------------------------------------------------------------------

namespace detail {

template <typename F>
CriterionResult timed(int id, std::string title, double limit, F&& body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.limit_seconds = limit;
  auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.correct = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Collects the first few failure descriptions.
struct Failures {
  std::size_t count = 0;
  std::vector<std::string> first;
  void add(std::string s) {
    if (first.size() < 3) first.push_back(std::move(s));
    ++count;
  }
  std::string summary(const std::string& ok) const {
    if (!count) return ok;
    std::string s = std::to_string(count) + " failures";
    for (const auto& f : first) s += "; " + f;
    return s;
  }
};

inline bool same(const Relation& r, const oracle::OSet& o) { return oracle::from_relation(r) == o; }

}  // namespace detail

inline constexpr std::uint64_t kSeed = 20240611;

inline CriterionResult criterion_operators() {
  return detail::timed(1, "operators agree with set-comprehension oracle (300 relations)", 10.0, [](auto& r) {
    Rng rng(kSeed + 1);
    detail::Failures fail;
    std::size_t checks = 0;
    for (int iter = 0; iter < 300; ++iter) {
      const std::size_t n = uniform(rng, 1, 4);
      auto domain = make_domain(n);
      RelationType t = random_type(rng);
      RelationType t2 = random_type(rng, 2);
      Relation R = random_relation(rng, t, domain), S = random_relation(rng, t, domain);
      Relation P = random_relation(rng, t2, domain, 4);
      Database db(domain, {{"R", R}, {"S", S}, {"P", P}});
      auto oR = oracle::from_relation(R), oS = oracle::from_relation(S), oP = oracle::from_relation(P);
      auto check = [&](const Expr& e, const oracle::OSet& expected) {
        ++checks;
        if (!detail::same(evaluate(e, db).value, expected)) fail.add(render_expr(e) + " on " + render_database(db));
      };
      using namespace expr;
      check(unite(rel("R"), rel("S")), oracle::o_union(oR, oS));
      check(minus(rel("R"), rel("S")), oracle::o_difference(oR, oS));
      check(times(rel("R"), rel("P")), oracle::o_product(oR, oP));
      std::vector<std::size_t> cols;
      for (std::size_t k = uniform(rng, 1, 3); k > 0; --k) cols.push_back(uniform(rng, 1, t.arity()));
      check(project(cols, rel("R")), oracle::o_project(oR, cols));
      std::vector<std::pair<std::size_t, std::size_t>> same_typed;
      for (std::size_t i = 1; i <= t.arity(); ++i)
        for (std::size_t j = 1; j <= t.arity(); ++j)
          if (t[i - 1] == t[j - 1]) same_typed.emplace_back(i, j);
      auto [si, sj] = same_typed[uniform(rng, 0, same_typed.size() - 1)];
      check(select_eq(si, sj, rel("R")), oracle::o_select(oR, si, true, sj));
      check(select_ne(si, sj, rel("R")), oracle::o_select(oR, si, false, sj));
      std::vector<std::size_t> all(t.arity());
      std::iota(all.begin(), all.end(), 1);
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<std::size_t> nest_cols(all.begin(), all.begin() + static_cast<long>(uniform(rng, 1, t.arity())));
      check(nest(nest_cols, rel("R")), oracle::o_nest(oR, nest_cols));
      for (std::size_t i = 1; i <= t.arity(); ++i)
        if (!t[i - 1].is_atom()) check(unnest(i, rel("R")), oracle::o_unnest(oR, i));
      check(unnest(t.arity() + 1, nest(nest_cols, rel("R"))),
            oracle::o_unnest(oracle::o_nest(oR, nest_cols), t.arity() + 1));
      if (R.size() <= 8) check(powerset(rel("R")), oracle::o_powerset(oR));
      check(dom(), oracle::o_domain(domain));
    }
    r.correct = fail.count == 0;
    r.detail = fail.summary(std::to_string(checks) + " operator applications agree");
  });
}

inline CriterionResult criterion_powerset() {
  return detail::timed(2, "solve{(X) | union(X,R) = R} equals powerset(R)", 5.0, [](auto& r) {
    detail::Failures fail;
    std::size_t cases = 0;
    auto run = [&](const Relation& R, const std::vector<Atom>& domain) {
      ++cases;
      Database db(domain, {{"R", R}});
      auto solved = evaluate(constructions::build_powerset_eq(R.type()), db).value;
      auto direct = evaluate(expr::powerset(expr::rel("R")), db).value;
      if (!(solved == direct) || !detail::same(solved, oracle::o_powerset(oracle::from_relation(R))))
        fail.add("R = " + render_relation(R) + " over " + std::to_string(domain.size()) + " atoms");
    };
    for (std::size_t n = 1; n <= 3; ++n) {
      auto domain = make_domain(n);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<std::vector<Value>> tuples;
        for (std::size_t i = 0; i < n; ++i)
          if (mask >> i & 1) tuples.push_back({Value(domain[i])});
        run(Relation::from_tuples(flat_type(1), tuples), domain);
      }
    }
    auto d2 = make_domain(2);
    for (std::uint64_t mask = 0; mask < 16; ++mask) run(digraph_from_mask(mask, d2), d2);
    r.correct = fail.count == 0;
    r.detail = fail.summary(std::to_string(cases) + " relations match");
  });
}

inline CriterionResult criterion_parity() {
  return detail::timed(3, "parity equation solvable exactly for even |D|, n = 1..4", 30.0, [](auto& r) {
    detail::Failures fail;
    std::ostringstream info;
    const Expr eq = constructions::build_parity_eq().as_solve();
    for (std::size_t n = 1; n <= 4; ++n) {
      Database db(make_domain(n), {});
      Evaluator ev(db);
      bool nonempty = ev.nonempty(eq);
      auto stats = ev.metrics().solves.at(0);
      if (nonempty != (n % 2 == 0)) fail.add("n=" + std::to_string(n) + " nonempty=" + std::to_string(nonempty));
      // A negative answer must come from exhausting every candidate.
      if (!nonempty && BigInt(stats.candidates_tested) != stats.candidate_space)
        fail.add("n=" + std::to_string(n) + " stopped after " + std::to_string(stats.candidates_tested));
      auto all = evaluate(eq, db).value;
      if (all.size() != oracle::parity_solution_count(n))
        fail.add("n=" + std::to_string(n) + " has " + std::to_string(all.size()) + " solutions");
      info << (n > 1 ? ", " : "") << "n=" << n << ":" << (nonempty ? "yes" : "no") << "/" << all.size();
    }
    r.correct = fail.count == 0;
    r.detail = fail.summary("nonempty/solutions " + info.str());
  });
}

inline CriterionResult criterion_singleton() {
  return detail::timed(4, "singleton equation has exactly n solutions, n = 1..6", 5.0, [](auto& r) {
    detail::Failures fail;
    const Expr eq = constructions::build_singleton_eq().as_solve();
    for (std::size_t n = 1; n <= 6; ++n) {
      auto domain = make_domain(n);
      auto sols = evaluate(eq, Database(domain, {})).value;
      oracle::OSet expected;
      for (auto a : domain) expected.insert({oracle::OValue::of_set({{oracle::OValue::of_atom(a.str())}})});
      if (sols.size() != n || !detail::same(sols, expected))
        fail.add("n=" + std::to_string(n) + " gives " + render_relation(sols));
    }
    r.correct = fail.count == 0;
    r.detail = fail.summary("counts 1..6 and the solutions are the singletons");
  });
}

inline CriterionResult criterion_tc_powerset() {
  return detail::timed(5, "least closed superset pipeline equals warshall_tc (512 at n=3, 50 at n=4)", 300.0,
                       [](auto& r) {
                         detail::Failures fail;
                         const Expr e = constructions::build_tc_powerset_expr();
                         // Over a sparse R the closed supersets number in the hundreds, and
                         // comparing them pairwise needs more than the default space.
                         EvalBudget budget;
                         budget.max_space_units = 1'000'000'000;
                         auto check = [&](const Relation& R, const std::vector<Atom>& domain) {
                           auto got = evaluate(e, Database(domain, {{"R", R}}), budget).value;
                           if (!(got == oracle::warshall_tc(R)))
                             fail.add("R = " + render_relation(R) + " gives " + render_relation(got));
                         };
                         auto d3 = make_domain(3);
                         for (std::uint64_t mask = 0; mask < 512; ++mask) check(digraph_from_mask(mask, d3), d3);
                         Rng rng(kSeed + 5);
                         auto d4 = make_domain(4);
                         for (int i = 0; i < 50; ++i) check(random_flat(rng, 2, d4, 0.5), d4);
                         r.correct = fail.count == 0;
                         r.detail = fail.summary("562 digraphs match");
                       });
}

/// Budget for the Run harness on the larger digraphs. Run can hold tens of
/// thousands of 6-tuples at n = 8, and unnesting {(Run)} repeats Run in every
/// output row, so the metered size grows with |Run| squared.
inline EvalBudget run_check_budget() {
  EvalBudget b;
  b.max_space_units = 10'000'000'000'000;
  return b;
}

inline CriterionResult criterion_tc_sparse() {
  return detail::timed(6, "Run solves its equation, mutants do not, pipeline equals warshall_tc (100 digraphs)",
                       120.0, [](auto& r) {
                         detail::Failures fail;
                         Rng rng(kSeed + 6);
                         const auto eq = constructions::build_run_equation();
                         const auto budget = run_check_budget();
                         std::size_t deletions = 0, additions = 0;
                         for (int i = 0; i < 100; ++i) {
                           const std::size_t n = uniform(rng, 1, 8);
                           auto domain = make_domain(n);
                           const double p = std::vector<double>{0.1, 0.2, 0.3, 0.5}[uniform(rng, 0, 3)];
                           Relation R = random_flat(rng, 2, domain, p);
                           Database db(domain, {{"R", R}});
                           auto check = constructions::tc_sparse_harness(db, budget);
                           if (!check.run_satisfies) fail.add("Run rejected for R = " + render_relation(R));
                           if (!(check.closure == oracle::warshall_tc(R)))
                             fail.add("closure differs for R = " + render_relation(R));

                           std::vector<std::vector<Value>> rows;
                           for (auto t : check.run) rows.emplace_back(t.begin(), t.end());
                           std::string kind;
                           if (!rows.empty() && coin(rng, 0.5)) {
                             rows.erase(rows.begin() + static_cast<long>(uniform(rng, 0, rows.size() - 1)));
                             kind = "deleting";
                             ++deletions;
                           } else {
                             std::vector<Value> extra;
                             do {
                               extra.clear();
                               for (int k = 0; k < 6; ++k) extra.emplace_back(domain[uniform(rng, 0, n - 1)]);
                             } while (check.run.contains(extra));
                             rows.push_back(extra);
                             kind = "adding";
                             ++additions;
                           }
                           Relation mutant = Relation::from_tuples(flat_type(6), rows);
                           if (constructions::satisfies(eq, db, {{"X", mutant}}, budget))
                             fail.add("mutant by " + kind + " a tuple accepted for R = " + render_relation(R));
                         }
                         r.correct = fail.count == 0;
                         r.detail = fail.summary("100 digraphs pass; mutants rejected (" + std::to_string(deletions) +
                                                 " deletions, " + std::to_string(additions) + " additions)");
                       });
}

inline CriterionResult criterion_nest_sparse() {
  return detail::timed(7, "nesting without nest equals op_nest (50 relations)", 60.0, [](auto& r) {
    detail::Failures fail;
    Rng rng(kSeed + 7);
    const Expr e = constructions::build_nest_sparse_expr();
    for (int i = 0; i < 50; ++i) {
      auto domain = make_domain(uniform(rng, 1, 5));
      Relation R = random_flat(rng, 2, domain, 0.4);
      auto got = evaluate(e, Database(domain, {{"R", R}})).value;
      if (!(got == op_nest(R, {2})) || !detail::same(got, oracle::o_nest(oracle::from_relation(R), {2})))
        fail.add("R = " + render_relation(R));
    }
    r.correct = fail.count == 0;
    r.detail = fail.summary("50 relations match");
  });
}

inline CriterionResult criterion_rewrites() {
  return detail::timed(8, "equation/disequation rewrites keep brute-force solution sets (50 equations)", 60.0,
                       [](auto& r) {
                         detail::Failures fail;
                         Rng rng(kSeed + 8);
                         for (int i = 0; i < 50; ++i) {
                           const std::size_t n = uniform(rng, 1, 3);
                           auto domain = make_domain(n);
                           Database db(domain,
                                       {{"R1", random_flat(rng, 1, domain, 0.5)}, {"R2", random_flat(rng, 2, domain, 0.4)}});
                           const std::size_t var_arity = uniform(rng, 1, 2), side_arity = uniform(rng, 1, 2);
                           ExprGen gen{rng, {}, {}, false, 0};
                           (var_arity == 1 ? gen.unary_vars : gen.binary_vars).push_back("X");
                           std::vector<Binder> vars{{"X", flat_type(var_arity)}};
                           Expr lhs = gen.of_arity(side_arity, 3);
                           Expr rhs = gen.of_arity(side_arity, 3);

                           // Brute force over every X by comprehension.
                           const oracle::OSet truth = oracle::o_eval(expr::solve(vars, lhs, rhs), db);
                           const std::string label = render_expr(lhs) + " = " + render_expr(rhs);

                           Schema schema = db.schema();
                           schema.emplace("X", flat_type(var_arity));
                           auto diseq = rewrite_eq_to_diseq(lhs, rhs, schema);
                           auto via_diseq = evaluate(solve_disequation(vars, diseq.body), db).value;
                           if (!detail::same(via_diseq, truth)) fail.add("eq->diseq: " + label);

                           auto back = rewrite_diseq_to_eq(diseq.body);
                           auto round_trip = evaluate(expr::solve(vars, back.lhs, back.rhs), db).value;
                           if (!detail::same(round_trip, truth)) fail.add("eq->diseq->eq: " + label);

                           // Starting from a disequation: body != empty.
                           Expr body = lhs;
                           oracle::OSet diseq_truth;
                           for (auto& cand : oracle::o_all_relations(flat_type(var_arity), domain)) {
                             std::map<std::string, oracle::OSet> env;
                             for (const auto& [name, rel] : db.relations()) env.emplace(name, oracle::from_relation(rel));
                             env["X"] = cand;
                             if (!oracle::o_eval(body, domain, env).empty())
                               diseq_truth.insert({oracle::OValue::of_set(cand)});
                           }
                           auto as_eq = rewrite_diseq_to_eq(body);
                           auto got = evaluate(expr::solve(vars, as_eq.lhs, as_eq.rhs), db).value;
                           if (!detail::same(got, diseq_truth)) fail.add("diseq->eq: " + render_expr(body));
                           auto again = rewrite_eq_to_diseq(as_eq.lhs, as_eq.rhs, schema);
                           auto got2 = evaluate(solve_disequation(vars, again.body), db).value;
                           if (!detail::same(got2, diseq_truth)) fail.add("diseq->eq->diseq: " + render_expr(body));
                         }
                         r.correct = fail.count == 0;
                         r.detail = fail.summary("50 equations, 4 rewrite paths each");
                       });
}

inline CriterionResult criterion_profiler() {
  return detail::timed(9, "profiler separates singleton, powerset and non-flat equations", 60.0, [](auto& r) {
    detail::Failures fail;
    auto counts = [](const ProfileReport& rep) {
      std::vector<std::uint64_t> c;
      for (const auto& p : rep.points) c.push_back(p.solutions_found);
      return c;
    };
    const auto singleton_gen = DbGenerator::parse("domain-only", {}, 1);
    auto s1 = profile(constructions::build_singleton_eq().as_solve(), "singleton", singleton_gen, 1, 5);
    auto s2 = profile(constructions::build_singleton_eq().as_solve(), "singleton", singleton_gen, 1, 5);
    if (counts(s1) != std::vector<std::uint64_t>{1, 2, 3, 4, 5}) fail.add("singleton counts");
    if (!(s1.solutions_growth == GrowthClass{GrowthClass::poly_like, 1}))
      fail.add("singleton classified " + s1.solutions_growth.to_string());

    const auto full = DbGenerator::parse("random-flat:1", {{"R", flat_type(1)}}, 1);
    auto p1 = profile(constructions::build_powerset_eq(), "powerset", full, 1, 4);
    auto p2 = profile(constructions::build_powerset_eq(), "powerset", full, 1, 4);
    if (counts(p1) != std::vector<std::uint64_t>{2, 4, 8, 16}) fail.add("powerset counts");
    if (p1.solutions_growth.kind != GrowthClass::exponential_like)
      fail.add("powerset classified " + p1.solutions_growth.to_string());

    auto nf = profile(constructions::build_powerset_of_powerset_eq(), "powerset-of-powerset", full, 1, 2);
    if (nf.verdict != ProfileReport::Verdict::non_flat) fail.add("nested variable not flagged");
    if (s1.verdict != ProfileReport::Verdict::flat_vars_ok) fail.add("flat singleton flagged");

    if (render_report(s1) != render_report(s2) || render_report(p1) != render_report(p2))
      fail.add("reports differ between identical runs");
    r.correct = fail.count == 0;
    r.detail = fail.summary("singleton " + s1.solutions_growth.to_string() + ", powerset " +
                            p1.solutions_growth.to_string() + ", nested variable " +
                            ProfileReport::verdict_name(nf.verdict));
  });
}

inline CriterionResult criterion_genericity() {
  return detail::timed(10, "evaluation commutes with domain permutations (20 pairs x 20 permutations)", 60.0,
                       [](auto& r) {
                         detail::Failures fail;
                         Rng rng(kSeed + 10);
                         for (int i = 0; i < 20; ++i) {
                           const std::size_t n = uniform(rng, 2, 4);
                           auto domain = make_domain(n);
                           Database db(domain,
                                       {{"R1", random_flat(rng, 1, domain, 0.5)}, {"R2", random_flat(rng, 2, domain, 0.4)}});
                           ExprGen gen{rng, {}, {}, true, 0};
                           Expr e = gen.of_arity(uniform(rng, 1, 2), 3);
                           Relation base = evaluate(e, db).value;
                           for (int k = 0; k < 20; ++k) {
                             auto image = domain;
                             std::shuffle(image.begin(), image.end(), rng);
                             std::map<Atom, Atom> f;
                             for (std::size_t j = 0; j < n; ++j) f.emplace(domain[j], image[j]);
                             std::map<std::string, Relation> moved;
                             for (const auto& [name, rel] : db.relations()) moved.emplace(name, permute_relation(rel, f));
                             Relation got = evaluate(e, Database(domain, moved)).value;
                             if (!(got == permute_relation(base, f))) fail.add(render_expr(e));
                           }
                         }
                         r.correct = fail.count == 0;
                         r.detail = fail.summary("400 permuted evaluations agree");
                       });
}

inline CriterionResult criterion_space() {
  return detail::timed(11, "sparse constructions meter polynomial space, powerset(D x D) exponential", 60.0,
                       [](auto& r) {
                         detail::Failures fail;
                         std::ostringstream info;
                         auto poly = [&](const ProfileReport& rep) {
                           info << rep.subject << " " << rep.space_growth.to_string() << "; ";
                           if (rep.truncated || rep.space_growth.kind != GrowthClass::poly_like ||
                               rep.space_growth.degree > 3)
                             fail.add(rep.subject + " space " + rep.space_growth.to_string());
                         };
                         const auto bare = DbGenerator::parse("domain-only", {}, 1);
                         const auto full2 = DbGenerator::parse("random-flat:1", {{"R", flat_type(2)}}, 11);
                         poly(meter_expression(constructions::build_singleton_eq().as_solve(), "singleton", bare, 2, 5));
                         poly(meter_expression(constructions::build_nest_sparse_expr(), "nest-sparse", full2, 2, 5));
                         auto big = meter_expression(expr::powerset(expr::times(expr::dom(), expr::dom())),
                                                     "powerset(times(D,D))", bare, 2, 4);
                         info << big.subject << " " << big.space_growth.to_string();
                         if (big.truncated || big.space_growth.kind != GrowthClass::exponential_like)
                           fail.add("powerset(times(D,D)) space " + big.space_growth.to_string());
                         r.correct = fail.count == 0;
                         r.detail = fail.summary(info.str());
                       });
}

struct Criterion {
  int id;
  std::function<CriterionResult()> run;
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, criterion_operators},   {2, criterion_powerset},     {3, criterion_parity},
      {4, criterion_singleton},   {5, criterion_tc_powerset},  {6, criterion_tc_sparse},
      {7, criterion_nest_sparse}, {8, criterion_rewrites},     {9, criterion_profiler},
      {10, criterion_genericity}, {11, criterion_space},
  };
  return all;
}

inline std::string format_line(const CriterionResult& r) {
  std::ostringstream out;
  out.precision(2);
  out << std::fixed << (r.pass() ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << " (" << r.seconds
      << "s, limit " << r.limit_seconds << "s): " << r.detail;
  if (r.correct && !r.pass()) out << " [over time limit]";
  return out.str();
}

}  // namespace eqalg::acceptance

#endif  // EQALG_ACCEPTANCE_HPP
