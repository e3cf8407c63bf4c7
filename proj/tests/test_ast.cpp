#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace eqalg;
using namespace eqalg::expr;
using namespace eqalg::testing;

TEST(FreeNames, SolveRemovesBinders) {
  auto e = solve({{"X", flat_type(2)}}, unite(rel("X"), rel("R")), rel("R"));
  EXPECT_EQ(free_names(e), (std::set<std::string>{"R"}));
  EXPECT_TRUE(free_names(dom()).empty());
  EXPECT_EQ(free_names(times(rel("R"), rel("S"))), (std::set<std::string>{"R", "S"}));
}

TEST(Builders, RejectBadNodes) {
  EXPECT_THROW(project({0}, rel("R")), ModelError);
  EXPECT_THROW(project({}, rel("R")), ModelError);
  EXPECT_THROW(solve({{"X", flat_type(1)}, {"X", flat_type(1)}}, rel("X"), rel("X")), ModelError);
  EXPECT_THROW(solve({{"X", RelationType::atom()}}, rel("X"), rel("X")), ModelError);
  EXPECT_THROW(rel("solve"), ModelError);
}

TEST(CheckBindings, FreeAndBoundClash) {
  auto inner = solve({{"X", flat_type(2)}}, unite(rel("X"), rel("R")), rel("R"));
  auto report = check_bindings(times(rel("X"), inner));
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations[0].name, "X");
  EXPECT_EQ(report.violations[0].path, "$.2");
  EXPECT_THROW(require_bindings(times(rel("X"), inner)), BindingError);
}

TEST(CheckBindings, AcceptsDisjointAndSimple) {
  EXPECT_TRUE(check_bindings(solve({{"X", flat_type(1)}}, rel("X"), rel("X"))).ok());
  auto nested = solve({{"Y", flat_type(1)}}, project({2}, unnest(1, solve({{"X", flat_type(1)}}, rel("X"), rel("X")))),
                      rel("Y"));
  EXPECT_TRUE(check_bindings(nested).ok());
}

TEST(CheckBindings, RejectsShadowing) {
  auto inner = solve({{"X", flat_type(1)}}, rel("X"), rel("X"));
  auto outer = solve({{"X", flat_type(1)}}, project({2}, unnest(1, inner)), rel("X"));
  auto report = check_bindings(outer);
  ASSERT_FALSE(report.ok());
  EXPECT_NE(report.violations[0].message.find("rebinds"), std::string::npos);
}

TEST(Rewrites, EqToDiseqShape) {
  auto d = rewrite_eq_to_diseq_unchecked(rel("X"), rel("R"));
  EXPECT_EQ(render_expr(d.body), "minus(D,project[1](times(D,union(minus(X,R),minus(R,X)))))");
  auto eq = rewrite_diseq_to_eq(rel("E"));
  EXPECT_EQ(render_expr(eq.lhs), "project[1](times(D,E))");
  EXPECT_EQ(render_expr(eq.rhs), "D");
}

TEST(Rewrites, EqToDiseqPreservesSolutions) {
  auto db = db_of("domain [a,b] relations { R : (0) = [[a]] }");
  auto original = evaluate(solve({{"X", flat_type(1)}}, rel("X"), rel("R")), db).value;
  auto d = rewrite_eq_to_diseq(rel("X"), rel("R"), Schema{{"R", flat_type(1)}, {"X", flat_type(1)}});
  auto rewritten = evaluate(solve_disequation({{"X", flat_type(1)}}, d.body), db).value;
  EXPECT_EQ(show(original), "[[[[a]]]]");
  EXPECT_EQ(rewritten, original);
}

TEST(Rewrites, IdenticalSidesGiveFullDomain) {
  auto db = db_of("domain [a,b,c] relations { R : (0,0) = [[a,b]] }");
  auto d = rewrite_eq_to_diseq_unchecked(rel("R"), rel("R"));
  EXPECT_EQ(evaluate(d.body, db).value, db.domain_relation());
}

TEST(Rewrites, EmptyBodyNeverHolds) {
  auto db = db_of("domain [a,b]");
  auto eq = rewrite_diseq_to_eq(minus(dom(), dom()));
  EXPECT_FALSE(evaluate(eq.lhs, db).value == evaluate(eq.rhs, db).value);
}

TEST(Rewrites, ParityRewrittenHasNoSolutionsAtThree) {
  auto p = constructions::build_parity_eq();
  auto d = rewrite_eq_to_diseq_unchecked(p.lhs, p.rhs);
  auto db = db_of("domain [a,b,c]");
  EXPECT_TRUE(evaluate(solve_disequation(p.vars, d.body), db).value.empty());
}

TEST(Rewrites, SingletonRoundTrip) {
  auto s = constructions::build_singleton_eq();
  for (std::size_t n = 1; n <= 3; ++n) {
    Database db(make_domain(n));
    auto original = evaluate(s.as_solve(), db).value;
    auto d = rewrite_eq_to_diseq_unchecked(s.lhs, s.rhs);
    auto back = rewrite_diseq_to_eq(d.body);
    auto round = evaluate(solve(s.vars, back.lhs, back.rhs), db).value;
    EXPECT_EQ(round, original) << "n=" << n;
    EXPECT_EQ(original.size(), n);
  }
}

TEST(EmptyLiteral, TakesTheOperandType) {
  auto db = db_of("domain [a,b] relations { R : (0,0) = [[a,b]] S : (0) = [[a]] }");
  EXPECT_TRUE(evaluate(empty_literal(rel("S")), db).value.empty());
  auto e = evaluate(empty_literal(rel("R")), db).value;
  EXPECT_TRUE(e.empty());
  EXPECT_EQ(e.type(), flat_type(2));
  // e = empty holds exactly when e is empty
  auto sol = evaluate(parse_expr("solve{(X:(0)) | minus(X,X) = empty}"), db).value;
  EXPECT_EQ(sol.size(), 4u);
}

// Property: free names of a solve never contain its binders.
TEST(FreeNamesProperty, SolveNeverExposesBinders) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    acceptance::ExprGen gen{rng, {"X"}, {}, true, 0};
    Expr body = gen.unary(3);
    Expr s = solve({{"X", flat_type(1)}}, body, rel("R1"));
    for_each_node(s, [](const Expr& node, const std::string&) {
      if (node.op() != Op::solve) return;
      auto names = free_names(node);
      for (const auto& b : node.binders()) EXPECT_EQ(names.count(b.name), 0u);
    });
  }
}
