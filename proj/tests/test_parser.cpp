#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace eqalg;
using namespace eqalg::expr;
using namespace eqalg::testing;
using acceptance::coin;
using acceptance::uniform;

TEST(ParseExpr, PowersetEquation) {
  auto e = parse_expr("solve{(X:(0,0)) | union(X,R) = R}");
  EXPECT_EQ(e, solve({{"X", flat_type(2)}}, unite(rel("X"), rel("R")), rel("R")));
}

TEST(ParseExpr, Unary) {
  EXPECT_EQ(parse_expr("project[2,3](unnest[1](E))"), project({2, 3}, unnest(1, rel("E"))));
  EXPECT_EQ(parse_expr("select[1!=2](R)"), select_ne(1, 2, rel("R")));
  EXPECT_EQ(parse_expr("nest[1, 3]( R )"), nest({1, 3}, rel("R")));
  EXPECT_EQ(parse_expr("powerset(D)"), powerset(dom()));
}

TEST(ParseExpr, DisequationDesugars) {
  auto e = parse_expr("solve{(T:(0,0)) | minus(R,T) != empty}");
  auto expected = solve_disequation({{"T", flat_type(2)}}, minus(rel("R"), rel("T")));
  EXPECT_EQ(e, expected);
}

TEST(ParseExpr, EmptyRhsDesugars) {
  auto e = parse_expr("solve{(X:(0)) | minus(D,X) = empty}");
  EXPECT_EQ(e.operand(1), empty_literal(minus(dom(), rel("X"))));
}

TEST(ParseExpr, Errors) {
  auto where = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_expr(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  EXPECT_EQ(where("union(R,"), (std::pair<std::size_t, std::size_t>{1, 9}));
  EXPECT_EQ(where("frobnicate(R)"), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(where("project[0](R)").first, 1u);
  EXPECT_EQ(where("R\n  $").first, 2u);
  EXPECT_THROW(parse_expr("solve{(X:(0)) | X != R}"), ParseError);
  EXPECT_THROW(parse_expr("R S"), ParseError);
}

TEST(ParseDatabase, Basic) {
  auto p = parse_database("domain [a, b]\nrelations {\n  R : (0,0) = [[a,b]]\n}\n");
  EXPECT_EQ(show(*p.database.find("R")), "[[a,b]]");
  EXPECT_EQ(p.schema.at("R"), flat_type(2));
}

TEST(ParseDatabase, NestedValue) {
  auto p = parse_database("domain [a] relations { R : ((0)) = [[[[a]]]] }");
  const Relation& r = *p.database.find("R");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(show(r.tuple(0)[0].relation()), "[[a]]");
}

TEST(ParseDatabase, Errors) {
  EXPECT_THROW(parse_database("domain []"), ParseError);
  EXPECT_THROW(parse_database("domain [a] relations { R : (0) = [[b]] }"), Error);
  EXPECT_THROW(parse_database("domain [a] relations { R : (0,0) = [[a]] }"), Error);
  EXPECT_THROW(parse_database("domain [a] relations { R : 0 = [] }"), ParseError);
  EXPECT_THROW(parse_database("domain [a,a]"), ParseError);
  EXPECT_THROW(parse_database("relations {}"), ParseError);
}

TEST(Render, CanonicalOrderAndEmpty) {
  auto r = Relation::from_tuples(flat_type(1), {{Atom("b")}, {Atom("a")}});
  EXPECT_EQ(show(r), "[[a],[b]]");
  EXPECT_EQ(show(Relation(flat_type(3))), "[]");
}

namespace {

Expr random_ast(Rng& rng, int depth) {
  static const std::vector<std::string> names{"R", "S", "X1", "Rel_2"};
  auto cols = [&](std::size_t max) {
    std::vector<std::size_t> c(uniform(rng, 1, 3));
    for (auto& x : c) x = uniform(rng, 1, max);
    return c;
  };
  if (depth <= 0 || coin(rng, 0.15)) return coin(rng, 0.3) ? dom() : rel(names[uniform(rng, 0, names.size() - 1)]);
  switch (uniform(rng, 0, 9)) {
    case 0: return unite(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 1: return minus(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 2: return times(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 3: return project(cols(9), random_ast(rng, depth - 1));
    case 4:
      return select(uniform(rng, 1, 12), coin(rng, 0.5) ? Comparison::eq : Comparison::ne, uniform(rng, 1, 4),
                    random_ast(rng, depth - 1));
    case 5: return nest(cols(5), random_ast(rng, depth - 1));
    case 6: return unnest(uniform(rng, 1, 3), random_ast(rng, depth - 1));
    case 7: return powerset(random_ast(rng, depth - 1));
    default: {
      std::vector<Binder> bs;
      std::size_t k = uniform(rng, 1, 2);
      for (std::size_t i = 0; i < k; ++i)
        bs.push_back({"V" + std::to_string(depth) + "_" + std::to_string(i), acceptance::random_type(rng)});
      return solve(bs, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    }
  }
}

}  // namespace

// Property: parse(render(e)) == e for random ASTs up to depth 5.
TEST(RoundTripProperty, Expressions) {
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    Expr e = random_ast(rng, 5);
    std::string text = render_expr(e);
    Expr back = parse_expr(text);
    ASSERT_EQ(back, e) << text;
    EXPECT_EQ(render_expr(back), text);
  }
}

// Property: databases round-trip.
TEST(RoundTripProperty, Databases) {
  Rng rng(29);
  for (int i = 0; i < 500; ++i) {
    auto d = make_domain(uniform(rng, 1, 4));
    std::map<std::string, Relation> rels;
    std::size_t k = uniform(rng, 0, 3);
    for (std::size_t j = 0; j < k; ++j) {
      auto t = acceptance::random_type(rng);
      rels.emplace("R" + std::to_string(j), acceptance::random_relation(rng, t, d));
    }
    Database db(d, rels);
    std::string text = render_database(db);
    auto back = parse_database(text);
    EXPECT_EQ(render_database(back.database), text);
    for (const auto& [name, r] : rels) {
      ASSERT_TRUE(back.database.find(name));
      EXPECT_EQ(*back.database.find(name), r);
      EXPECT_EQ(back.schema.at(name), r.type());
      EXPECT_EQ(parse_relation(show(r), r.type()), r);
    }
  }
}

// Property: distinct canonical values render differently.
TEST(RenderProperty, InjectiveOnCanonicalValues) {
  Rng rng(31);
  auto d = make_domain(2);
  auto t = parse_type("(0,(0))");
  std::vector<Relation> vs;
  for (int i = 0; i < 120; ++i) vs.push_back(acceptance::random_relation(rng, t, d, 3));
  for (const auto& a : vs)
    for (const auto& b : vs) EXPECT_EQ(show(a) == show(b), a == b);
}
