#include <gtest/gtest.h>

#include <set>

#include "support/fixtures.hpp"

using namespace eqalg;
using namespace eqalg::constructions;
using namespace eqalg::testing;

namespace {
Relation bin(const std::string& text) { return R("(0,0)", text); }

Database digraph_db(const Relation& r, std::size_t n) { return Database(make_domain(n), {{"R", r}}); }
}  // namespace

TEST(Compose, Examples) {
  EXPECT_EQ(show(compose(bin("[[a,b]]"), bin("[[b,c]]"))), "[[a,c]]");
  EXPECT_EQ(show(compose(bin("[[a,b]]"), bin("[]"))), "[]");
  EXPECT_EQ(show(compose(bin("[[a,b],[b,c]]"), bin("[[b,c],[c,a]]"))), "[[a,c],[b,a]]");
  EXPECT_THROW(compose(R("(0)", "[[a]]"), bin("[]")), ModelError);
}

TEST(PowerTable, Chain) {
  auto t = build_power_table(bin("[[a,b],[b,c]]"));
  EXPECT_EQ(show(t.level(2).power), "[[a,c]]");
  EXPECT_EQ(show(t.level(2).upto), "[[a,b],[a,c],[b,c]]");
  EXPECT_EQ(show(t.level(2).exact), "[[a,c]]");
  EXPECT_EQ(show(t.level(3).exact), "[]");
  EXPECT_EQ(t.closure(), oracle::warshall_tc(bin("[[a,b],[b,c]]")));
}

TEST(PowerTable, ClosedAndEmpty) {
  auto closed = build_power_table(bin("[[a,a],[a,b],[b,b]]"));
  EXPECT_TRUE(closed.level(2).exact.empty());
  auto empty = build_power_table(bin("[]"));
  for (const auto& l : empty.levels) EXPECT_TRUE(l.power.empty() && l.upto.empty() && l.exact.empty());
}

TEST(BuildRun, Examples) {
  EXPECT_EQ(build_run(bin("[[a,b],[b,c]]")).size(), 6u);
  EXPECT_TRUE(build_run(bin("[[a,b],[b,c],[a,c]]")).empty());
  EXPECT_EQ(build_run(bin("[[a,b],[b,c]]")).arity(), 6u);
}

// Independent re-statement of Run over std::set pairs.
TEST(BuildRun, PathOfLengthThreeMatchesFormula) {
  using P = std::pair<std::string, std::string>;
  std::set<P> r{{"a", "b"}, {"b", "c"}, {"c", "d"}};
  auto step = [&](const std::set<P>& s) {
    std::set<P> out;
    for (auto [x, y] : s)
      for (auto [u, v] : r)
        if (y == u) out.insert({x, v});
    return out;
  };
  std::vector<std::set<P>> pow{{}, r}, upto{{}, r};
  for (std::size_t i = 2; i <= r.size() + 1; ++i) {
    pow.push_back(step(pow.back()));
    auto u = upto.back();
    u.insert(pow.back().begin(), pow.back().end());
    upto.push_back(u);
  }
  std::set<std::vector<std::string>> run;
  for (std::size_t i = 1; i <= r.size(); ++i) {
    std::set<P> exact;
    for (const auto& p : pow[i + 1])
      if (!upto[i].count(p)) exact.insert(p);
    for (const auto& x : upto[i])
      for (const auto& y : upto[i + 1])
        for (const auto& z : exact) run.insert({x.first, x.second, y.first, y.second, z.first, z.second});
  }
  auto got = build_run(bin("[[a,b],[b,c],[c,d]]"));
  ASSERT_EQ(got.size(), run.size());
  for (auto t : got) {
    std::vector<std::string> row;
    for (const auto& v : t) row.push_back(v.atom().str());
    EXPECT_TRUE(run.count(row));
  }
}

TEST(RunEquation, RunSolvesItAndMutantsDoNot) {
  auto eq = build_run_equation();
  auto r = bin("[[a,b],[b,c]]");
  auto db = digraph_db(r, 3);
  auto run = build_run(r);
  EXPECT_TRUE(satisfies(eq, db, {{"X", run}}));
  for (std::size_t k = 0; k < run.size(); ++k) {
    std::vector<std::vector<Value>> rows;
    for (std::size_t j = 0; j < run.size(); ++j)
      if (j != k) rows.emplace_back(run.tuple(j).begin(), run.tuple(j).end());
    EXPECT_FALSE(satisfies(eq, db, {{"X", Relation::from_tuples(flat_type(6), rows)}})) << "deleted " << k;
  }
  std::vector<std::vector<Value>> rows;
  for (auto t : run) rows.emplace_back(t.begin(), t.end());
  rows.push_back({Atom("c"), Atom("c"), Atom("a"), Atom("a"), Atom("b"), Atom("a")});
  EXPECT_FALSE(satisfies(eq, db, {{"X", Relation::from_tuples(flat_type(6), rows)}}));
  EXPECT_TRUE(free_names(eq.as_solve()) == (std::set<std::string>{"R"}));
}

// Property: Run solves the equation and the pipeline gives the closure.
TEST(TcSparseProperty, RandomDigraphs) {
  Rng rng(61);
  for (int i = 0; i < 12; ++i) {
    std::size_t n = acceptance::uniform(rng, 2, 5);
    auto d = make_domain(n);
    auto r = acceptance::random_flat(rng, 2, d, 0.3);
    auto check = tc_sparse_harness(Database(d, {{"R", r}}), acceptance::run_check_budget());
    EXPECT_TRUE(check.run_satisfies) << show(r);
    EXPECT_EQ(check.closure, oracle::warshall_tc(r)) << show(r);
  }
}

TEST(TcSparse, Examples) {
  auto chain = tc_sparse_harness(digraph_db(bin("[[a,b],[b,c]]"), 3));
  EXPECT_EQ(show(chain.closure), "[[a,b],[a,c],[b,c]]");
  auto closed = bin("[[a,b],[b,c],[a,c]]");
  auto c = tc_sparse_harness(digraph_db(closed, 3));
  EXPECT_TRUE(c.run.empty());
  EXPECT_EQ(c.closure, closed);
  auto cycle = tc_sparse_harness(digraph_db(bin("[[a,b],[b,a]]"), 2));
  EXPECT_EQ(show(cycle.closure), "[[a,a],[a,b],[b,a],[b,b]]");
}

TEST(TcPowerset, Examples) {
  auto e = build_tc_powerset_expr();
  EXPECT_EQ(show(evaluate(e, digraph_db(bin("[[a,b]]"), 2)).value), "[[a,b]]");
  EXPECT_EQ(show(evaluate(e, digraph_db(bin("[[a,b],[b,a]]"), 2)).value), "[[a,a],[a,b],[b,a],[b,b]]");
  EXPECT_EQ(show(evaluate(e, digraph_db(bin("[]"), 2)).value), "[]");
}

TEST(TcPowerset, InnerSolveIsAllClosedSupersets) {
  auto r = bin("[[a,b]]");
  auto db = digraph_db(r, 2);
  auto inner = solve({{"T", flat_type(2)}}, tc_condition(expr::rel("T"), expr::rel("R")), expr::minus(expr::rel("R"), expr::rel("R")));
  auto got = evaluate(inner, db).value;
  std::set<std::string> expected;
  auto all = enumerate_relations(flat_type(2), db.domain());
  while (auto t = all.next()) {
    bool superset = op_difference(r, *t).empty();
    if (superset && oracle::warshall_tc(*t) == *t) expected.insert(show(*t));
  }
  std::set<std::string> seen;
  for (auto row : got) seen.insert(show(row[0].relation()));
  EXPECT_EQ(seen, expected);
}

TEST(Parity, Counts) {
  auto p = build_parity_eq().as_solve();
  EXPECT_EQ(evaluate(p, Database(make_domain(2))).value.size(), 2u);
  EXPECT_EQ(evaluate(p, Database(make_domain(3))).value.size(), 0u);
  EXPECT_EQ(evaluate(p, Database(make_domain(4))).value.size(), oracle::parity_solution_count(4));
  EXPECT_EQ(oracle::parity_solution_count(4), 12u);
}

TEST(Singleton, CountsAndValues) {
  auto s = build_singleton_eq().as_solve();
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(evaluate(s, Database(make_domain(n))).value.size(), n);
  EXPECT_EQ(show(evaluate(s, Database(make_domain(3))).value), "[[[[a]]],[[[b]]],[[[c]]]]");
}

TEST(NestSparse, Examples) {
  auto e = build_nest_sparse_expr();
  EXPECT_EQ(show(evaluate(e, digraph_db(bin("[[a,b],[a,c]]"), 3)).value), "[[a,b,[[b],[c]]],[a,c,[[b],[c]]]]");
  EXPECT_EQ(show(evaluate(e, digraph_db(bin("[]"), 2)).value), "[]");
}

// Property: equals op_nest, and the raw equation has |pi1 R| + 1 solutions.
TEST(NestSparseProperty, MatchesNestOperator) {
  Rng rng(67);
  for (int i = 0; i < 25; ++i) {
    auto d = make_domain(acceptance::uniform(rng, 1, 4));
    auto r = acceptance::random_flat(rng, 2, d, 0.4);
    Database db(d, {{"R", r}});
    EXPECT_EQ(evaluate(build_nest_sparse_expr(), db).value, op_nest(r, {2})) << show(r);
    auto sols = evaluate(build_nest_sparse_eq().as_solve(), db).value;
    EXPECT_EQ(sols.size(), op_project(r, {1}).size() + 1) << show(r);
  }
}

TEST(Powerset, Examples) {
  auto db = db_of("domain [a,b] relations { R : (0) = [[a]] }");
  auto got = evaluate(build_powerset_eq(), db).value;
  EXPECT_EQ(show(got), "[[[]],[[[a]]]]");
  EXPECT_EQ(got, op_powerset(*db.find("R")));
  for (std::size_t k = 0; k <= 3; ++k) {
    auto d = make_domain(3);
    std::vector<std::vector<Value>> rows;
    for (std::size_t j = 0; j < k; ++j) rows.push_back({d[j]});
    Database dbk(d, {{"R", Relation::from_tuples(flat_type(1), rows)}});
    EXPECT_EQ(evaluate(build_powerset_eq(), dbk).value.size(), std::size_t{1} << k);
  }
  auto one = db_of("domain [a] relations { R : (0) = [[a]] }");
  EXPECT_EQ(evaluate(build_powerset_of_powerset_eq(), one).value.size(), 4u);
}

TEST(Warshall, Examples) {
  EXPECT_EQ(show(oracle::warshall_tc(bin("[[a,b],[b,c]]"))), "[[a,b],[a,c],[b,c]]");
  EXPECT_TRUE(oracle::warshall_tc(bin("[]")).empty());
  Rng rng(71);
  auto d = make_domain(4);
  for (int i = 0; i < 30; ++i) {
    auto r = acceptance::random_flat(rng, 2, d, 0.3);
    auto tc = oracle::warshall_tc(r);
    EXPECT_EQ(oracle::warshall_tc(tc), tc);
  }
}

TEST(Registry, EveryConstructionVerifies) {
  auto chain = db_of("domain [a,b,c] relations { R : (0,0) = [[a,b],[b,c]] }");
  auto unary = db_of("domain [a,b] relations { R : (0) = [[a]] }");
  auto bare = db_of("domain [a,b,c]");
  for (const auto& c : registry()) {
    const Database& db = c.schema.empty() ? bare : (c.schema.at("R").arity() == 1 ? unary : chain);
    auto out = c.run(db, {}, true);
    EXPECT_TRUE(out.verified) << c.name;
    EXPECT_TRUE(out.pass) << c.name << ": " << out.oracle;
  }
  EXPECT_EQ(find_construction("nope"), nullptr);
}
