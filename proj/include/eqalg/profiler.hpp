#ifndef EQALG_PROFILER_HPP
#define EQALG_PROFILER_HPP

// Runs an equation or expression over databases of growing domain size and
// fits the solution counts and peak space against two growth models. The
// result is sampled evidence about one generator family, never a decision:
// sparsity quantifies over every database and is undecidable in general.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "eqalg/ast.hpp"
#include "eqalg/error.hpp"
#include "eqalg/eval.hpp"
#include "eqalg/model.hpp"
#include "eqalg/parser.hpp"

namespace eqalg {

//---------------------------------------------------------------------------
// Growth classification
//---------------------------------------------------------------------------

/// A model must explain at least this share of the variance to be accepted.
inline constexpr double kMinFitR2 = 0.9;
/// Exponential growth is reported only when the log-linear fit leaves at most
/// this fraction of the log-log fit's unexplained variance.
inline constexpr double kExponentialResidualRatio = 0.25;
inline constexpr std::size_t kMinClassifyPoints = 3;

struct GrowthClass {
  enum Kind { poly_like, exponential_like, inconclusive } kind = inconclusive;
  int degree = 0;  ///< for poly_like

  std::string to_string() const {
    switch (kind) {
      case poly_like: return "POLY_LIKE(" + std::to_string(degree) + ")";
      case exponential_like: return "EXPONENTIAL_LIKE";
      case inconclusive: break;
    }
    return "INCONCLUSIVE";
  }
  friend bool operator==(const GrowthClass&, const GrowthClass&) = default;
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 0;
  return f;
}

/// Fits log(v + 1) against log n (polynomial model, degree = rounded slope)
/// and against n (exponential model). Polynomial is the default reading of
/// an acceptable log-log fit; exponential needs a markedly better log-linear
/// fit.
inline GrowthClass classify_growth(const std::vector<std::size_t>& ns, const std::vector<double>& values) {
  if (ns.size() != values.size()) throw ModelError("classify_growth: series lengths differ");
  if (ns.size() < kMinClassifyPoints) return {};
  std::vector<double> logn, lin, y;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) throw ModelError("classify_growth: domain size 0");
    logn.push_back(std::log(static_cast<double>(ns[i])));
    lin.push_back(static_cast<double>(ns[i]));
    y.push_back(std::log(values[i] + 1));
  }
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) return {GrowthClass::poly_like, 0};
  LinearFit poly = fit_line(logn, y), expo = fit_line(lin, y);
  if (expo.r2 >= kMinFitR2 && 1 - expo.r2 <= kExponentialResidualRatio * (1 - poly.r2))
    return {GrowthClass::exponential_like, 0};
  if (poly.r2 >= kMinFitR2) return {GrowthClass::poly_like, static_cast<int>(std::lround(poly.slope))};
  return {};
}

//---------------------------------------------------------------------------
// Database generation
//---------------------------------------------------------------------------

/// Databases over atoms x1..xn: either the bare domain, or random flat
/// relations with an independent inclusion probability per tuple.
struct DbGenerator {
  enum class Mode { domain_only, random_flat };

  Schema schema;
  Mode mode = Mode::domain_only;
  double default_density = 0.5;
  std::map<std::string, double> density;
  std::uint64_t seed = 0;

  double density_of(const std::string& name) const {
    auto it = density.find(name);
    return it == density.end() ? default_density : it->second;
  }

  /// "domain-only", "random-flat", "random-flat:P" or "random-flat:R=P,S=Q".
  static DbGenerator parse(std::string_view spec, Schema schema, std::uint64_t seed) {
    DbGenerator g;
    g.schema = std::move(schema);
    g.seed = seed;
    auto bad = [&](const std::string& why) { return ModelError("generator '" + std::string(spec) + "': " + why); };
    auto parse_p = [&](std::string_view s) {
      std::string text(s);
      std::size_t used = 0;
      double p = 0;
      try {
        p = std::stod(text, &used);
      } catch (const std::exception&) {
        throw bad("'" + text + "' is not a probability");
      }
      if (used != text.size() || !(p >= 0 && p <= 1)) throw bad("'" + text + "' is not a probability in [0,1]");
      return p;
    };
    if (spec == "domain-only") {
      if (!g.schema.empty()) throw bad("domain-only cannot fill relations; use random-flat");
      return g;
    }
    const std::string_view prefix = "random-flat";
    if (spec.substr(0, prefix.size()) != prefix) throw bad("unknown mode");
    g.mode = Mode::random_flat;
    std::string_view rest = spec.substr(prefix.size());
    if (!rest.empty()) {
      if (rest[0] != ':') throw bad("expected ':' after random-flat");
      rest.remove_prefix(1);
      if (rest.find('=') == std::string_view::npos) {
        g.default_density = parse_p(rest);
      } else {
        while (!rest.empty()) {
          auto comma = rest.find(',');
          std::string_view item = rest.substr(0, comma);
          auto eq = item.find('=');
          if (eq == std::string_view::npos) throw bad("expected NAME=P");
          std::string name(item.substr(0, eq));
          if (!g.schema.count(name)) throw bad("relation " + name + " is not in the schema");
          g.density[name] = parse_p(item.substr(eq + 1));
          rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
      }
    }
    for (const auto& [name, type] : g.schema)
      if (!type.is_flat()) throw bad("relation " + name + " has non-flat type " + to_string(type));
    return g;
  }

  std::string describe() const {
    if (mode == Mode::domain_only) return "domain-only";
    std::ostringstream out;
    out << "random-flat:";
    bool first = true;
    for (const auto& [name, type] : schema) {
      out << (first ? "" : ",") << name << "=" << density_of(name);
      first = false;
    }
    return out.str();
  }

  Database generate(std::size_t n) const {
    if (n == 0) throw ModelError("generator: domain size must be positive");
    std::vector<Atom> domain;
    for (std::size_t i = 1; i <= n; ++i) domain.emplace_back("x" + std::to_string(i));
    std::sort(domain.begin(), domain.end());
    std::map<std::string, Relation> relations;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n)};
    std::mt19937_64 rng(seq);
    for (const auto& [name, type] : schema) {
      const double p = mode == Mode::random_flat ? density_of(name) : 0.0;
      const std::size_t k = type.arity();
      std::vector<Value> cells;
      std::vector<std::size_t> digit(k, 0);
      while (true) {
        // 53 random bits as a uniform double in [0, 1).
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < p)
          for (auto d : digit) cells.emplace_back(domain[d]);
        std::size_t pos = k;
        while (pos > 0 && ++digit[pos - 1] == n) digit[--pos] = 0;
        if (pos == 0) break;
      }
      relations.emplace(name, Relation::from_sorted_cells(type, std::move(cells)));
    }
    return Database(std::move(domain), std::move(relations));
  }
};

//---------------------------------------------------------------------------
// Reports
//---------------------------------------------------------------------------

struct ProfilePoint {
  std::size_t n = 0;
  BigInt candidates = 0;  ///< candidate space summed over solve executions
  std::uint64_t candidates_tested = 0;
  std::uint64_t solutions_found = 0;  ///< size of the result
  std::uint64_t peak_space_units = 0;
  double wall_seconds = 0;
};

struct ProfileReport {
  enum class Verdict { flat_vars_ok, non_flat };

  std::string subject;
  std::string mode;  ///< "equation" or "expression"
  std::string generator;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::flat_vars_ok;
  std::vector<ProfilePoint> points;
  GrowthClass solutions_growth;
  GrowthClass space_growth;
  bool truncated = false;
  std::size_t truncated_at = 0;
  std::string truncation;  ///< the budget message

  static const char* verdict_name(Verdict v) { return v == Verdict::non_flat ? "NON_FLAT" : "FLAT_VARS_OK"; }
};

inline constexpr const char* kReportHeader =
    "# Sampled evidence from one database generator; sparsity is undecidable and this is not a decision.";

/// Whether every variable of every solve node in `e` has a flat type.
inline bool flat_variables(const Expr& e) {
  bool flat = true;
  for_each_node(e, [&](const Expr& node, const std::string&) {
    if (node.op() == Op::solve)
      for (const auto& b : node.binders())
        if (!b.type.is_flat()) flat = false;
  });
  return flat;
}

namespace detail {

struct PointOutcome {
  std::optional<ProfilePoint> point;
  std::optional<BudgetExceeded> budget;
};

inline PointOutcome run_point(const Expr& e, const DbGenerator& gen, std::size_t n, const EvalBudget& budget) {
  Database db = gen.generate(n);
  auto start = std::chrono::steady_clock::now();
  try {
    EvalResult r = evaluate(e, db, budget);
    ProfilePoint p;
    p.n = n;
    for (const auto& s : r.metrics.solves) {
      p.candidates += s.candidate_space * s.executions;
      p.candidates_tested += s.candidates_tested;
    }
    p.solutions_found = r.value.size();
    p.peak_space_units = r.metrics.peak_space_units;
    p.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {p, std::nullopt};
  } catch (const BudgetExceeded& b) {
    return {std::nullopt, b};
  }
}

inline ProfileReport run_profile(const Expr& e, std::string subject, std::string mode, const DbGenerator& gen,
                                 std::size_t lo, std::size_t hi, const EvalBudget& budget, unsigned jobs) {
  if (lo == 0 || lo > hi) throw ModelError("profile: n-range must be ascending and start at 1 or more");
  check_expression(e, gen.generate(lo));

  ProfileReport report;
  report.subject = std::move(subject);
  report.mode = std::move(mode);
  report.generator = gen.describe();
  report.seed = gen.seed;
  report.verdict = flat_variables(e) ? ProfileReport::Verdict::flat_vars_ok : ProfileReport::Verdict::non_flat;

  const std::size_t count = hi - lo + 1;
  std::vector<PointOutcome> outcomes(count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      outcomes[i] = run_point(e, gen, lo + i, budget);
      if (outcomes[i].budget) break;
    }
  } else {
    std::mutex m;
    std::size_t next = 0;
    auto worker = [&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard lock(m);
          if (next == count) return;
          i = next++;
        }
        outcomes[i] = run_point(e, gen, lo + i, budget);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<std::size_t>(jobs, count); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (outcomes[i].budget) {
      report.truncated = true;
      report.truncated_at = lo + i;
      report.truncation = outcomes[i].budget->what();
      break;
    }
    report.points.push_back(*outcomes[i].point);
  }

  std::vector<std::size_t> ns;
  std::vector<double> sols, space;
  for (const auto& p : report.points) {
    ns.push_back(p.n);
    sols.push_back(static_cast<double>(p.solutions_found));
    space.push_back(static_cast<double>(p.peak_space_units));
  }
  report.solutions_growth = classify_growth(ns, sols);
  report.space_growth = classify_growth(ns, space);
  return report;
}

}  // namespace detail

/// Solves `solve_expr` on gen.generate(n) for each n in [lo, hi].
inline ProfileReport profile(const Expr& solve_expr, std::string subject, const DbGenerator& gen, std::size_t lo,
                             std::size_t hi, const EvalBudget& budget = {}, unsigned jobs = 1) {
  if (solve_expr.op() != Op::solve) throw ModelError("profile: expression is not a solve");
  return detail::run_profile(solve_expr, std::move(subject), "equation", gen, lo, hi, budget, jobs);
}

/// Evaluates an arbitrary expression for each n in [lo, hi], recording peak
/// space and result size.
inline ProfileReport meter_expression(const Expr& e, std::string subject, const DbGenerator& gen, std::size_t lo,
                                      std::size_t hi, const EvalBudget& budget = {}, unsigned jobs = 1) {
  return detail::run_profile(e, std::move(subject), "expression", gen, lo, hi, budget, jobs);
}

inline std::string render_table(const ProfileReport& r, bool timing = false) {
  std::ostringstream out;
  out << kReportHeader << "\n";
  out << "subject   " << r.subject << " (" << r.mode << ")\n";
  out << "generator " << r.generator << " seed " << r.seed << "\n";
  out << "verdict   " << ProfileReport::verdict_name(r.verdict) << "\n";
  auto pad = [](std::string s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; };
  out << pad("n", 4) << pad("candidates", 22) << pad("tested", 12) << pad("solutions", 12) << pad("peak_space", 14);
  if (timing) out << pad("seconds", 12);
  out << "\n";
  for (const auto& p : r.points) {
    out << pad(std::to_string(p.n), 4) << pad(p.candidates.str(), 22) << pad(std::to_string(p.candidates_tested), 12)
        << pad(std::to_string(p.solutions_found), 12) << pad(std::to_string(p.peak_space_units), 14);
    if (timing) {
      std::ostringstream t;
      t.precision(3);
      t << std::fixed << p.wall_seconds;
      out << pad(t.str(), 12);
    }
    out << "\n";
  }
  if (r.truncated) out << "truncated at n=" << r.truncated_at << ": " << r.truncation << "\n";
  out << "solutions growth " << r.solutions_growth.to_string() << "\n";
  out << "space growth     " << r.space_growth.to_string() << "\n";
  return out.str();
}

namespace detail {

inline std::string growth_list(const GrowthClass& g) {
  switch (g.kind) {
    case GrowthClass::poly_like: return "[POLY_LIKE," + std::to_string(g.degree) + "]";
    case GrowthClass::exponential_like: return "[EXPONENTIAL_LIKE]";
    case GrowthClass::inconclusive: break;
  }
  return "[INCONCLUSIVE]";
}

/// Words of the nested-list syntax cannot hold '-', ':' or '.', so free text
/// is carried as a list of character codes.
inline std::string text_list(const std::string& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(static_cast<unsigned char>(s[i]));
  }
  return out + "]";
}

inline std::string list_text(const ListNode& n) {
  if (!n.is_list) throw ParseError(n.line, n.column, "expected a list of character codes");
  std::string s;
  for (const auto& c : n.items) {
    if (c.is_list || !all_digits(c.word) || c.word.size() > 3 || std::stoi(c.word) > 255)
      throw ParseError(c.line, c.column, "expected a character code");
    s += static_cast<char>(std::stoi(c.word));
  }
  return s;
}

}  // namespace detail

/// The machine-readable form: a `profile { key : value }` block in the
/// nested-list syntax of database files.
inline std::string render_report(const ProfileReport& r) {
  std::ostringstream out;
  out << kReportHeader << "\n";
  out << "profile {\n";
  out << "  subject : " << detail::text_list(r.subject) << "\n";
  out << "  mode : " << r.mode << "\n";
  out << "  generator : " << detail::text_list(r.generator) << "\n";
  out << "  seed : " << r.seed << "\n";
  out << "  verdict : " << ProfileReport::verdict_name(r.verdict) << "\n";
  out << "  solutions_growth : " << detail::growth_list(r.solutions_growth) << "\n";
  out << "  space_growth : " << detail::growth_list(r.space_growth) << "\n";
  out << "  truncated : ";
  if (r.truncated)
    out << "[yes," << r.truncated_at << "," << detail::text_list(r.truncation) << "]\n";
  else
    out << "[no]\n";
  out << "  # n, candidates, tested, solutions, peak_space\n";
  out << "  points : [";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    out << (i ? "," : "") << "[" << p.n << "," << p.candidates.str() << "," << p.candidates_tested << ","
        << p.solutions_found << "," << p.peak_space_units << "]";
  }
  out << "]\n}\n";
  return out.str();
}

inline ProfileReport parse_report(std::string_view text) {
  Parser p(text);
  if (!p.accept_word("profile")) Parser::fail(p.peek(), "expected 'profile'");
  p.expect("{");
  std::map<std::string, ListNode> fields;
  while (!p.accept("}")) {
    const auto key_token = p.peek();
    std::string key = p.expect_word("a field name or '}'");
    p.expect(":");
    if (!fields.emplace(key, p.parse_list_node()).second) Parser::fail(key_token, "field " + key + " repeated");
  }
  p.expect_end();

  auto field = [&](const char* key) -> const ListNode& {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(1, 1, std::string("report is missing field ") + key);
    return it->second;
  };
  auto word = [](const ListNode& n) {
    if (n.is_list) throw ParseError(n.line, n.column, "expected a word");
    return n.word;
  };
  auto number = [&](const ListNode& n) -> std::uint64_t {
    auto w = word(n);
    if (!detail::all_digits(w) || w.size() > 19) throw ParseError(n.line, n.column, "expected a number");
    return std::stoull(w);
  };
  auto growth = [&](const ListNode& n) {
    if (!n.is_list || n.items.empty()) throw ParseError(n.line, n.column, "expected a growth class");
    auto kind = word(n.items[0]);
    if (kind == "POLY_LIKE" && n.items.size() == 2)
      return GrowthClass{GrowthClass::poly_like, static_cast<int>(number(n.items[1]))};
    if (kind == "EXPONENTIAL_LIKE" && n.items.size() == 1) return GrowthClass{GrowthClass::exponential_like, 0};
    if (kind == "INCONCLUSIVE" && n.items.size() == 1) return GrowthClass{};
    throw ParseError(n.line, n.column, "unknown growth class");
  };

  ProfileReport r;
  r.subject = detail::list_text(field("subject"));
  r.mode = word(field("mode"));
  r.generator = detail::list_text(field("generator"));
  r.seed = number(field("seed"));
  auto verdict = word(field("verdict"));
  if (verdict == "NON_FLAT")
    r.verdict = ProfileReport::Verdict::non_flat;
  else if (verdict == "FLAT_VARS_OK")
    r.verdict = ProfileReport::Verdict::flat_vars_ok;
  else
    throw ParseError(field("verdict").line, field("verdict").column, "unknown verdict");
  r.solutions_growth = growth(field("solutions_growth"));
  r.space_growth = growth(field("space_growth"));
  const ListNode& t = field("truncated");
  if (!t.is_list || t.items.empty()) throw ParseError(t.line, t.column, "expected [no] or [yes,n,message]");
  if (word(t.items[0]) == "yes" && t.items.size() == 3) {
    r.truncated = true;
    r.truncated_at = number(t.items[1]);
    r.truncation = detail::list_text(t.items[2]);
  } else if (!(word(t.items[0]) == "no" && t.items.size() == 1)) {
    throw ParseError(t.line, t.column, "expected [no] or [yes,n,message]");
  }
  const ListNode& pts = field("points");
  if (!pts.is_list) throw ParseError(pts.line, pts.column, "expected a list of points");
  for (const auto& pn : pts.items) {
    if (!pn.is_list || pn.items.size() != 5) throw ParseError(pn.line, pn.column, "expected a 5-element point");
    ProfilePoint pt;
    pt.n = number(pn.items[0]);
    auto c = word(pn.items[1]);
    if (!detail::all_digits(c)) throw ParseError(pn.line, pn.column, "expected a number");
    pt.candidates = BigInt(c);
    pt.candidates_tested = number(pn.items[2]);
    pt.solutions_found = number(pn.items[3]);
    pt.peak_space_units = number(pn.items[4]);
    r.points.push_back(pt);
  }
  return r;
}

}  // namespace eqalg

#endif  // EQALG_PROFILER_HPP
