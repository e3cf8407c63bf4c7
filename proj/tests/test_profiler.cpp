#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace eqalg;
using namespace eqalg::constructions;
using namespace eqalg::testing;

namespace {

std::vector<double> counts(const ProfileReport& r) {
  std::vector<double> v;
  for (const auto& p : r.points) v.push_back(static_cast<double>(p.solutions_found));
  return v;
}

const Schema kUnary{{"R", flat_type(1)}};
const Schema kBinary{{"R", flat_type(2)}};

}  // namespace

TEST(Classify, CanonicalSeries) {
  EXPECT_EQ(classify_growth({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}).to_string(), "POLY_LIKE(1)");
  EXPECT_EQ(classify_growth({1, 2, 3, 4}, {2, 4, 8, 16}).to_string(), "EXPONENTIAL_LIKE");
  EXPECT_EQ(classify_growth({2, 3, 4, 5, 6}, {4, 9, 16, 25, 36}).to_string(), "POLY_LIKE(2)");
  EXPECT_EQ(classify_growth({1, 2, 3}, {7, 7, 7}).to_string(), "POLY_LIKE(0)");
  EXPECT_EQ(classify_growth({1, 2}, {1, 2}).to_string(), "INCONCLUSIVE");
  EXPECT_THROW(classify_growth({1, 2, 3}, {1, 2}), ModelError);
}

// Property: appending a larger n to a clean series keeps its class.
TEST(ClassifyProperty, MonotoneStable) {
  std::vector<std::size_t> ns{1, 2, 3, 4};
  std::vector<double> lin{1, 2, 3, 4}, expo{2, 4, 8, 16};
  auto lin_class = classify_growth(ns, lin), exp_class = classify_growth(ns, expo);
  for (std::size_t n = 5; n <= 8; ++n) {
    ns.push_back(n);
    lin.push_back(static_cast<double>(n));
    expo.push_back(std::pow(2.0, static_cast<double>(n)));
    EXPECT_EQ(classify_growth(ns, lin), lin_class) << n;
    EXPECT_EQ(classify_growth(ns, expo), exp_class) << n;
  }
}

TEST(Generator, ParseAndDescribe) {
  EXPECT_EQ(DbGenerator::parse("domain-only", {}, 1).describe(), "domain-only");
  EXPECT_EQ(DbGenerator::parse("random-flat:0.25", kBinary, 1).describe(), "random-flat:R=0.25");
  auto g = DbGenerator::parse("random-flat:R=1", kUnary, 1);
  EXPECT_EQ(g.density_of("R"), 1.0);
  EXPECT_THROW(DbGenerator::parse("domain-only", kUnary, 1), ModelError);
  EXPECT_THROW(DbGenerator::parse("random-flat:2", kUnary, 1), ModelError);
  EXPECT_THROW(DbGenerator::parse("random-flat:S=0.5", kUnary, 1), ModelError);
  EXPECT_THROW(DbGenerator::parse("sparse", kUnary, 1), ModelError);
  EXPECT_THROW(DbGenerator::parse("random-flat", {{"N", parse_type("((0))")}}, 1), ModelError);
}

TEST(Generator, DeterministicAtomsAndRelations) {
  auto g = DbGenerator::parse("random-flat:0.5", kBinary, 99);
  auto a = g.generate(4), b = g.generate(4);
  EXPECT_EQ(render_database(a), render_database(b));
  EXPECT_EQ(a.domain().front().str(), "x1");
  EXPECT_EQ(a.domain().size(), 4u);
  auto full = DbGenerator::parse("random-flat:1", kBinary, 1).generate(3);
  EXPECT_EQ(full.find("R")->size(), 9u);
}

TEST(Profile, SingletonIsPolyLinear) {
  auto r = profile(build_singleton_eq().as_solve(), "singleton", DbGenerator::parse("domain-only", {}, 1), 1, 5);
  EXPECT_EQ(counts(r), (std::vector<double>{1, 2, 3, 4, 5}));
  EXPECT_EQ(r.solutions_growth.to_string(), "POLY_LIKE(1)");
  EXPECT_EQ(r.verdict, ProfileReport::Verdict::flat_vars_ok);
  EXPECT_FALSE(r.truncated);
}

TEST(Profile, FullUnaryPowersetIsExponential) {
  auto r = profile(build_powerset_eq(), "powerset", DbGenerator::parse("random-flat:1", kUnary, 1), 1, 4);
  EXPECT_EQ(counts(r), (std::vector<double>{2, 4, 8, 16}));
  EXPECT_EQ(r.solutions_growth.to_string(), "EXPONENTIAL_LIKE");
}

TEST(Profile, NonFlatVariable) {
  auto r = profile(build_powerset_of_powerset_eq(), "pp", DbGenerator::parse("random-flat:1", kUnary, 1), 1, 2);
  EXPECT_EQ(r.verdict, ProfileReport::Verdict::non_flat);
  EXPECT_FALSE(flat_variables(build_powerset_of_powerset_eq()));
  EXPECT_TRUE(flat_variables(build_powerset_eq()));
}

TEST(Profile, RejectsNonSolveAndBadRanges) {
  auto g = DbGenerator::parse("domain-only", {}, 1);
  EXPECT_THROW(profile(expr::dom(), "D", g, 1, 3), ModelError);
  EXPECT_THROW(meter_expression(expr::dom(), "D", g, 3, 2), ModelError);
  EXPECT_THROW(meter_expression(expr::dom(), "D", g, 0, 2), ModelError);
}

TEST(Profile, TruncatesAtBudget) {
  auto r = profile(build_parity_eq().as_solve(), "parity", DbGenerator::parse("domain-only", {}, 1), 1, 6);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.truncated_at, 5u);
  EXPECT_EQ(r.points.size(), 4u);
  EXPECT_NE(r.truncation.find("max_candidates"), std::string::npos);
}

// Property: per-n solution counts agree with an independent evaluation.
TEST(ProfileProperty, CountsMatchEvaluation) {
  auto g = DbGenerator::parse("random-flat:0.4", kBinary, 5);
  auto e = build_nest_sparse_eq().as_solve();
  auto r = profile(e, "nest", g, 1, 4);
  ASSERT_EQ(r.points.size(), 4u);
  for (const auto& p : r.points) EXPECT_EQ(p.solutions_found, evaluate(e, g.generate(p.n)).value.size());
}

// Property: reports are deterministic given seed and budget, also with jobs.
TEST(ProfileProperty, Deterministic) {
  auto g = DbGenerator::parse("random-flat:0.5", kBinary, 17);
  auto a = meter_expression(build_nest_sparse_expr(), "nest", g, 2, 4);
  auto b = meter_expression(build_nest_sparse_expr(), "nest", g, 2, 4, {}, 3);
  EXPECT_EQ(render_report(a), render_report(b));
  EXPECT_EQ(render_table(a), render_table(b));
}

TEST(Meter, LinearAndExponential) {
  auto dom_only = DbGenerator::parse("domain-only", {}, 1);
  auto lin = meter_expression(expr::project({1}, expr::dom()), "p1", dom_only, 2, 6);
  EXPECT_EQ(lin.space_growth.to_string(), "POLY_LIKE(1)");
  auto big = meter_expression(expr::powerset(expr::times(expr::dom(), expr::dom())), "pdd", dom_only, 2, 4);
  EXPECT_EQ(big.space_growth.to_string(), "EXPONENTIAL_LIKE");
  for (const auto& p : big.points) EXPECT_GE(BigInt(p.peak_space_units), BigInt(1) << (p.n * p.n));
}

TEST(Meter, NestSparseSpaceIsLowDegree) {
  auto r = meter_expression(build_nest_sparse_expr(), "nest", DbGenerator::parse("random-flat:1", kBinary, 1), 2, 5);
  ASSERT_EQ(r.space_growth.kind, GrowthClass::poly_like);
  EXPECT_LE(r.space_growth.degree, 3);
}

TEST(Report, RoundTrip) {
  auto r = profile(build_parity_eq().as_solve(), "parity: five terms", DbGenerator::parse("domain-only", {}, 3), 1, 5);
  auto text = render_report(r);
  EXPECT_EQ(text.rfind(kReportHeader, 0), 0u);
  auto back = parse_report(text);
  EXPECT_EQ(render_report(back), text);
  EXPECT_EQ(back.subject, "parity: five terms");
  EXPECT_TRUE(back.truncated);
  EXPECT_THROW(parse_report("profile { mode : equation }"), ParseError);
}

TEST(Report, TableHeaderStatesTheCaveat) {
  auto r = profile(build_singleton_eq().as_solve(), "singleton", DbGenerator::parse("domain-only", {}, 1), 1, 3);
  auto t = render_table(r);
  EXPECT_EQ(t.rfind(kReportHeader, 0), 0u);
  EXPECT_EQ(t.find("seconds"), std::string::npos);
  EXPECT_NE(render_table(r, true).find("seconds"), std::string::npos);
}
