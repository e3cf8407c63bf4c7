#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace eqalg;
using namespace eqalg::expr;
using namespace eqalg::testing;

namespace {
const Database kDb = db_of(R"(
domain [a, b, c]
relations {
  R : (0,0) = [[a,b],[a,c],[b,b]]
  S : (0) = [[b]]
  T : (0) = [[a]]
  P : (0) = [[a],[b]]
}
)");
}  // namespace

TEST(Operators, UnionDifferenceProduct) {
  EXPECT_EQ(show(eval_text("union(T,S)", kDb)), "[[a],[b]]");
  EXPECT_EQ(show(eval_text("minus(P,S)", kDb)), "[[a]]");
  EXPECT_EQ(show(eval_text("times(T,P)", kDb)), "[[a,a],[a,b]]");
  EXPECT_EQ(show(eval_text("times(T,minus(T,T))", kDb)), "[]");
}

TEST(Operators, ProjectSelect) {
  EXPECT_EQ(show(eval_text("project[2](R)", kDb)), "[[b],[c]]");
  EXPECT_EQ(show(eval_text("project[2,1](R)", kDb)), "[[b,a],[b,b],[c,a]]");
  EXPECT_EQ(show(eval_text("select[1=2](R)", kDb)), "[[b,b]]");
  EXPECT_EQ(show(eval_text("select[1!=2](R)", kDb)), "[[a,b],[a,c]]");
}

TEST(Operators, Nest) {
  EXPECT_EQ(show(eval_text("nest[2](R)", kDb)), "[[a,b,[[b],[c]]],[a,c,[[b],[c]]],[b,b,[[b]]]]");
  EXPECT_EQ(show(eval_text("nest[1,2](R)", kDb)),
            "[[a,b,[[a,b],[a,c],[b,b]]],[a,c,[[a,b],[a,c],[b,b]]],[b,b,[[a,b],[a,c],[b,b]]]]");
  EXPECT_EQ(show(eval_text("nest[1](minus(R,R))", kDb)), "[]");
}

TEST(Operators, Unnest) {
  EXPECT_EQ(show(eval_text("unnest[3](nest[2](R))", kDb)),
            "[[a,b,[[b],[c]],b],[a,b,[[b],[c]],c],[a,c,[[b],[c]],b],[a,c,[[b],[c]],c],[b,b,[[b]],b]]");
  EXPECT_EQ(to_string(infer_type(parse_expr("unnest[3](nest[2](R))"), kDb.schema())), "(0,0,(0),0)");
  auto db = db_of("domain [a] relations { N : (0,(0)) = [[a,[]]] }");
  EXPECT_EQ(show(eval_text("unnest[2](N)", db)), "[]");
  EXPECT_EQ(eval_text("project[1,2](unnest[3](nest[2](R)))", kDb), *kDb.find("R"));
}

TEST(Operators, Powerset) {
  EXPECT_EQ(show(eval_text("powerset(P)", kDb)), "[[[]],[[[a]]],[[[a],[b]]],[[[b]]]]");
  EXPECT_EQ(show(eval_text("powerset(minus(P,P))", kDb)), "[[[]]]");
}

TEST(Operators, ParityBodyOnAMatching) {
  auto p = constructions::build_parity_eq();
  auto db = db_of("domain [a,b] relations { X : (0,0) = [[a,b]] }");
  EXPECT_TRUE(evaluate(p.lhs, db).value.empty());
}

TEST(Solve, PowersetEquation) {
  auto db = db_of("domain [a,b] relations { R : (0) = [[a]] }");
  EXPECT_EQ(show(eval_text("solve{(X:(0)) | union(X,R) = R}", db)), "[[[]],[[[a]]]]");
}

TEST(Solve, Singleton) {
  auto db = db_of("domain [a,b,c]");
  EXPECT_EQ(show(evaluate(constructions::build_singleton_eq().as_solve(), db).value),
            "[[[[a]]],[[[b]]],[[[c]]]]");
}

TEST(Solve, Parity) {
  auto p = constructions::build_parity_eq().as_solve();
  EXPECT_TRUE(evaluate(p, db_of("domain [a,b,c]")).value.empty());
  EXPECT_EQ(show(evaluate(p, db_of("domain [a,b]")).value), "[[[[a,b]]],[[[b,a]]]]");
  EXPECT_TRUE(solve_nonempty(p, Database(make_domain(4))));
  EXPECT_FALSE(solve_nonempty(p, Database(make_domain(3))));
}

TEST(Solve, NonemptyStopsAtFirstCandidate) {
  auto db = db_of("domain [a,b,c]");
  Evaluator ev(db);
  EXPECT_TRUE(ev.nonempty(parse_expr("solve{(X:(0,0)) | X = X}")));
  ASSERT_EQ(ev.metrics().solves.size(), 1u);
  EXPECT_EQ(ev.metrics().solves[0].candidates_tested, 1u);
}

TEST(Solve, MultipleVariables) {
  auto db = db_of("domain [a,b]");
  auto r = eval_text("solve{(X:(0),Y:(0)) | X = minus(D,Y)}", db);
  EXPECT_EQ(r.size(), 4u);
  for (auto t : r) EXPECT_EQ(op_union(t[0].relation(), t[1].relation()).size(), 2u);
}

TEST(Budget, CandidatesCheckedBeforeEnumerating) {
  EvalBudget b;
  b.max_candidates = 1000;
  try {
    evaluate(constructions::build_parity_eq().as_solve(), Database(make_domain(4)), b);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.cap(), BudgetExceeded::Cap::candidates);
    EXPECT_EQ(e.candidates_tested(), 0u);
  }
}

TEST(Budget, SolutionsCap) {
  EvalBudget b;
  b.max_solutions = 3;
  try {
    eval_text("solve{(X:(0)) | X = X}", db_of("domain [a,b,c]"), b);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.cap(), BudgetExceeded::Cap::solutions);
    EXPECT_EQ(e.solutions_found(), 4u);
  }
}

TEST(Budget, SpaceCapNamesTheNode) {
  EvalBudget b;
  b.max_space_units = 40;
  try {
    eval_text("union(R, project[1,2](times(R,R)))", kDb, b);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.cap(), BudgetExceeded::Cap::space);
    EXPECT_EQ(e.node(), "$.2.1");
  }
}

TEST(Budget, PowersetPrecheck) {
  EvalBudget b;
  b.max_space_units = 1000;
  EXPECT_THROW(eval_text("powerset(times(D,D))", db_of("domain [a,b,c]"), b), BudgetExceeded);
}

TEST(Metrics, SpaceUnits) {
  auto r = evaluate(parse_expr("times(T,P)"), kDb);
  // T and P are names (free), the product holds 2 tuples of 2 atoms.
  EXPECT_EQ(r.metrics.peak_space_units, 6u);
  EXPECT_EQ(r.value.size_units(), 6u);
}

// Property: solutions_found <= candidates_tested <= candidate space.
TEST(MetricsProperty, CounterOrdering) {
  Rng rng(41);
  auto d = make_domain(2);
  Database db(d, {{"R1", acceptance::random_flat(rng, 1, d, 0.5)}, {"R2", acceptance::random_flat(rng, 2, d, 0.5)}});
  for (int i = 0; i < 60; ++i) {
    acceptance::ExprGen gen{rng, {"X"}, {}, true, 0};
    Expr a = gen.unary(2), b = gen.unary(2);
    auto r = evaluate(solve({{"X", flat_type(1)}}, a, b), db);
    for (const auto& s : r.metrics.solves) {
      EXPECT_LE(s.solutions_found, s.candidates_tested);
      EXPECT_LE(BigInt(s.candidates_tested), s.candidate_space * s.executions);
    }
  }
}

// Property: peak space of a flat solve is bounded by one candidate plus the
// larger of the two sides' working sets plus the accumulated solutions.
TEST(MetricsProperty, SolvePeakBound) {
  Rng rng(43);
  auto d = make_domain(3);
  Database db(d, {{"R1", acceptance::random_flat(rng, 1, d, 0.5)}, {"R2", acceptance::random_flat(rng, 2, d, 0.4)}});
  for (int i = 0; i < 40; ++i) {
    acceptance::ExprGen gen{rng, {"X"}, {}, false, 0};
    Expr lhs = gen.unary(3), rhs = gen.unary(3);
    auto r = evaluate(solve({{"X", flat_type(1)}}, lhs, rhs), db);
    std::uint64_t worst = 0;
    auto e = enumerate_relations(flat_type(1), d);
    while (auto x = e.next()) {
      auto rels = db.relations();
      rels.emplace("X", *x);
      Database with_x(d, rels);
      auto l = evaluate(lhs, with_x), rr = evaluate(rhs, with_x);
      std::uint64_t here = x->size_units() + std::max(l.metrics.peak_space_units,
                                                      l.value.size_units() + rr.metrics.peak_space_units);
      worst = std::max(worst, here);
    }
    EXPECT_LE(r.metrics.peak_space_units, worst + r.value.size_units()) << render_expr(lhs) << " = " << render_expr(rhs);
  }
}

TEST(Determinism, RepeatedRenderingsMatch) {
  Rng rng(47);
  auto d = make_domain(3);
  Database db(d, {{"R1", acceptance::random_flat(rng, 1, d, 0.5)}, {"R2", acceptance::random_flat(rng, 2, d, 0.5)}});
  for (int i = 0; i < 40; ++i) {
    acceptance::ExprGen gen{rng, {}, {}, true, 0};
    Expr e = gen.of_arity(2, 3);
    auto a = evaluate(e, db), b = evaluate(e, db);
    EXPECT_EQ(show(a.value), show(b.value));
    EXPECT_EQ(a.metrics.peak_space_units, b.metrics.peak_space_units);
  }
}

// Property: solve equals an independent filter of all candidates.
TEST(SolveProperty, MatchesBruteForceFilter) {
  Rng rng(53);
  for (int i = 0; i < 60; ++i) {
    auto d = make_domain(acceptance::uniform(rng, 1, 3));
    Database db(d, {{"R1", acceptance::random_flat(rng, 1, d, 0.5)}, {"R2", acceptance::random_flat(rng, 2, d, 0.4)}});
    acceptance::ExprGen gen{rng, {"X"}, {}, false, 0};
    Expr a = gen.unary(2), b = gen.unary(2);
    auto got = oracle::from_relation(evaluate(solve({{"X", flat_type(1)}}, a, b), db).value);
    oracle::OSet expected;
    std::map<std::string, oracle::OSet> env;
    for (const auto& [n, r] : db.relations()) env.emplace(n, oracle::from_relation(r));
    for (const auto& x : oracle::o_all_relations(flat_type(1), d)) {
      env["X"] = x;
      if (oracle::o_eval(a, d, env) == oracle::o_eval(b, d, env)) expected.insert({oracle::OValue::of_set(x)});
    }
    EXPECT_EQ(got, expected) << render_expr(a) << " = " << render_expr(b);
  }
}

// Property: evaluation commutes with atom permutations.
TEST(GenericityProperty, Permutations) {
  Rng rng(59);
  auto d = make_domain(3);
  for (int i = 0; i < 30; ++i) {
    Database db(d, {{"R1", acceptance::random_flat(rng, 1, d, 0.5)}, {"R2", acceptance::random_flat(rng, 2, d, 0.4)}});
    acceptance::ExprGen gen{rng, {}, {}, true, 0};
    Expr e = gen.of_arity(2, 3);
    auto perm = d;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::map<Atom, Atom> f;
    for (std::size_t k = 0; k < d.size(); ++k) f.emplace(d[k], perm[k]);
    std::map<std::string, Relation> moved;
    for (const auto& [n, r] : db.relations()) moved.emplace(n, acceptance::permute_relation(r, f));
    EXPECT_EQ(evaluate(e, Database(d, moved)).value, acceptance::permute_relation(evaluate(e, db).value, f));
  }
}

TEST(Checked, RejectsBadInput) {
  EXPECT_THROW(eval_text("union(R,S)", kDb), TypeError);
  EXPECT_THROW(eval_text("times(X, solve{(X:(0)) | X = S})", kDb), BindingError);
  EXPECT_THROW(eval_text("Q", kDb), TypeError);
}
