// eqalg: evaluate, solve, profile and verify equation-algebra expressions.

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eqalg/acceptance.hpp"
#include "eqalg/eqalg.hpp"

namespace {

using namespace eqalg;

enum Exit { kOk = 0, kUserError = 1, kBudget = 2, kInternal = 3 };

/// Raised for bad command lines and unreadable files.
struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct BudgetFlags {
  std::optional<std::string> candidates;
  std::optional<std::uint64_t> space;
  std::optional<std::uint64_t> solutions;

  void add_to(CLI::App* app) {
    app->add_option("--max-candidates", candidates, "candidate-space cap per solve execution (env EQALG_MAX_CANDIDATES)");
    app->add_option("--max-space", space, "live space cap in units (env EQALG_MAX_SPACE)");
    app->add_option("--max-solutions", solutions, "solution cap per solve execution (env EQALG_MAX_SOLUTIONS)");
  }

  static std::uint64_t parse_u64(const std::string& text, const char* what) {
    if (text.empty() || !detail::all_digits(text)) throw UsageError(std::string(what) + ": '" + text + "' is not a count");
    try {
      return std::stoull(text);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": '" + text + "' is out of range");
    }
  }

  static BigInt parse_big(const std::string& text, const char* what) {
    if (text.empty() || !detail::all_digits(text)) throw UsageError(std::string(what) + ": '" + text + "' is not a count");
    return BigInt(text);
  }

  /// Defaults, then the environment, then the flags.
  EvalBudget resolve() const {
    EvalBudget b;
    if (const char* v = std::getenv("EQALG_MAX_CANDIDATES")) b.max_candidates = parse_big(v, "EQALG_MAX_CANDIDATES");
    if (const char* v = std::getenv("EQALG_MAX_SPACE")) b.max_space_units = parse_u64(v, "EQALG_MAX_SPACE");
    if (const char* v = std::getenv("EQALG_MAX_SOLUTIONS")) b.max_solutions = parse_u64(v, "EQALG_MAX_SOLUTIONS");
    if (candidates) b.max_candidates = parse_big(*candidates, "--max-candidates");
    if (space) b.max_space_units = *space;
    if (solutions) b.max_solutions = *solutions;
    return b;
  }
};

std::string render_metrics(const EvalMetrics& m) {
  std::ostringstream out;
  out << "metrics {\n";
  out << "  peak_space_units : " << m.peak_space_units << "\n";
  for (const auto& s : m.solves) {
    out << "  solve " << s.path << " (" << s.variables << ") : candidate_space " << s.candidate_space.str()
        << ", executions " << s.executions << ", tested " << s.candidates_tested << ", solutions "
        << s.solutions_found << "\n";
  }
  out << "}\n";
  return out.str();
}

ParsedDatabase load_database(const std::string& path) { return parse_database(read_file(path)); }

Expr expression_from(const std::optional<std::string>& text, const std::optional<std::string>& file) {
  if (text && file) throw UsageError("give either --expr or --expr-file, not both");
  if (text) return parse_expr(*text);
  if (file) return parse_expr(read_file(*file));
  throw UsageError("an expression is required (--expr or --expr-file)");
}

/// Maps library errors to exit codes and prints them.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.candidates_tested() || e.solutions_found())
      std::cerr << "partial: " << e.candidates_tested() << " candidates tested, " << e.solutions_found()
                << " solutions found\n";
    return kBudget;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) throw UsageError("--n-range expects A..B, got '" + s + "'");
  auto a = BudgetFlags::parse_u64(s.substr(0, dots), "--n-range");
  auto b = BudgetFlags::parse_u64(s.substr(dots + 2), "--n-range");
  if (a == 0 || a > b) throw UsageError("--n-range must be ascending and start at 1 or more");
  return {a, b};
}

/// "NAME:TYPE", e.g. "R:(0,0)".
std::pair<std::string, RelationType> parse_schema_entry(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--relation expects NAME:TYPE, got '" + s + "'");
  std::string name = s.substr(0, colon);
  if (!is_valid_relation_name(name)) throw UsageError("invalid relation name '" + name + "'");
  RelationType t = parse_type(s.substr(colon + 1));
  if (t.is_atom()) throw UsageError("relation " + name + " cannot have the atom type 0");
  return {name, t};
}

//---------------------------------------------------------------------------
// REPL
//---------------------------------------------------------------------------

class Repl {
 public:
  explicit Repl(EvalBudget budget) : budget_(std::move(budget)) {}

  void load(const std::string& path) {
    auto parsed = load_database(path);
    db_.emplace(std::move(parsed.database));
    std::cout << "loaded " << path << ": " << db_->domain().size() << " atoms, " << db_->relations().size()
              << " relations\n";
  }

  int run(std::istream& in) {
    const bool interactive = isatty(STDIN_FILENO);
    std::string line;
    while (true) {
      if (interactive) std::cout << "eqalg> " << std::flush;
      if (!std::getline(in, line)) break;
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      line = line.substr(first);
      while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) line.pop_back();
      if (line == ":quit" || line == ":q") break;
      guarded([&] {
        step(line);
        return 0;
      });
      std::cout << std::flush;
    }
    return kOk;
  }

 private:
  void step(const std::string& line) {
    if (line.rfind(":load", 0) == 0) {
      auto path = line.substr(5);
      path.erase(0, path.find_first_not_of(' '));
      if (path.empty()) throw UsageError(":load needs a file");
      load(path);
    } else if (line.rfind(":type", 0) == 0) {
      Expr e = parse_expr(line.substr(5));
      require_bindings(e);
      std::cout << to_string(infer_type(e, database().schema())) << "\n";
    } else if (line == ":metrics") {
      metrics_ = !metrics_;
      std::cout << "metrics " << (metrics_ ? "on" : "off") << "\n";
    } else if (line == ":db") {
      std::cout << render_database(database());
    } else if (line == ":help") {
      std::cout << ":load FILE   read a database\n"
                   ":type EXPR   show the inferred type\n"
                   ":metrics     toggle metering output\n"
                   ":db          print the database\n"
                   ":quit        leave\n"
                   "anything else is evaluated as an expression\n";
    } else if (line[0] == ':') {
      throw UsageError("unknown command " + line.substr(0, line.find(' ')) + " (try :help)");
    } else {
      auto r = evaluate(parse_expr(line), database(), budget_);
      std::cout << render_relation(r.value) << "\n";
      if (metrics_) std::cout << render_metrics(r.metrics);
    }
  }

  const Database& database() const {
    if (!db_) throw UsageError("no database loaded (use :load FILE)");
    return *db_;
  }

  EvalBudget budget_;
  std::optional<Database> db_;
  bool metrics_ = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested relational algebra with equations: evaluation, solving, profiling."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  BudgetFlags budget;

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate an expression on a database");
  std::string eval_db;
  std::optional<std::string> eval_expr, eval_file;
  bool eval_metrics = false;
  eval_cmd->add_option("--db", eval_db, "database file")->required();
  eval_cmd->add_option("--expr", eval_expr, "expression text");
  eval_cmd->add_option("--expr-file", eval_file, "file holding the expression");
  eval_cmd->add_flag("--metrics", eval_metrics, "print the metrics block to stderr");
  budget.add_to(eval_cmd);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve an equation (a solve{...} expression)");
  std::string solve_db;
  std::optional<std::string> solve_expr, solve_file;
  bool solve_metrics = false, solve_nonempty_only = false;
  solve_cmd->add_option("--db", solve_db, "database file")->required();
  solve_cmd->add_option("--expr", solve_expr, "solve{...} expression text");
  solve_cmd->add_option("--expr-file", solve_file, "file holding the expression");
  solve_cmd->add_flag("--nonempty", solve_nonempty_only, "only decide whether a solution exists");
  solve_cmd->add_flag("--metrics", solve_metrics, "print the metrics block to stderr");
  budget.add_to(solve_cmd);

  // check
  auto* check_cmd = app.add_subcommand("check", "validate a database and optionally type an expression");
  std::string check_db;
  std::optional<std::string> check_expr, check_file;
  check_cmd->add_option("--db", check_db, "database file")->required();
  check_cmd->add_option("--expr", check_expr, "expression text");
  check_cmd->add_option("--expr-file", check_file, "file holding the expression");

  // construction
  auto* cons_cmd = app.add_subcommand("construction", "run a named construction");
  std::string cons_name, cons_db;
  bool cons_verify = false, cons_list = false, cons_metrics = false;
  cons_cmd->add_option("--name,--construction", cons_name, "construction name");
  cons_cmd->add_option("--db", cons_db, "database file");
  cons_cmd->add_flag("--verify", cons_verify, "compare against the registered oracle");
  cons_cmd->add_flag("--list", cons_list, "list the constructions");
  cons_cmd->add_flag("--metrics", cons_metrics, "print the metrics block to stderr");
  budget.add_to(cons_cmd);

  // profile
  auto* prof_cmd = app.add_subcommand("profile", "profile solution counts and peak space over growing domains");
  std::string prof_eq, prof_range = "1..4", prof_gen;
  std::vector<std::string> prof_relations;
  std::uint64_t prof_seed = 1;
  std::optional<std::string> prof_out;
  unsigned prof_jobs = 1;
  bool prof_timing = false;
  prof_cmd->add_option("--eq", prof_eq, "construction name or file holding an expression")->required();
  prof_cmd->add_option("--n-range", prof_range, "domain sizes A..B")->capture_default_str();
  prof_cmd->add_option("--gen", prof_gen,
                       "domain-only | random-flat | random-flat:P | random-flat:R=P,... "
                       "(default: domain-only without relations, random-flat otherwise)");
  prof_cmd->add_option("--relation", prof_relations, "NAME:TYPE of a relation the generator fills (files only)");
  prof_cmd->add_option("--seed", prof_seed, "generator seed")->capture_default_str();
  prof_cmd->add_option("--out", prof_out, "write the machine-readable report here");
  prof_cmd->add_option("--jobs", prof_jobs, "run domain sizes in parallel")->check(CLI::Range(1u, 256u));
  prof_cmd->add_flag("--timing", prof_timing, "add wall-clock seconds to the table");
  budget.add_to(prof_cmd);

  // repl
  auto* repl_cmd = app.add_subcommand("repl", "interactive evaluation");
  std::optional<std::string> repl_db;
  repl_cmd->add_option("--db", repl_db, "database to load first");
  budget.add_to(repl_cmd);

  // acceptance
  auto* acc_cmd = app.add_subcommand("acceptance", "run the acceptance criteria, one PASS/FAIL line each");
  std::vector<int> acc_only;
  acc_cmd->add_option("--only", acc_only, "criterion ids to run (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUserError;
  }

  if (*eval_cmd) {
    return guarded([&] {
      auto parsed = load_database(eval_db);
      Expr e = expression_from(eval_expr, eval_file);
      auto r = evaluate(e, parsed.database, budget.resolve());
      std::cout << render_relation(r.value) << "\n";
      if (eval_metrics) std::cerr << render_metrics(r.metrics);
      return kOk;
    });
  }

  if (*solve_cmd) {
    return guarded([&] {
      auto parsed = load_database(solve_db);
      Expr e = expression_from(solve_expr, solve_file);
      if (e.op() != Op::solve) throw UsageError("solve expects a solve{...} expression");
      if (solve_nonempty_only) {
        bool any = solve_nonempty(e, parsed.database, budget.resolve());
        std::cout << (any ? "nonempty" : "empty") << "\n";
        return kOk;
      }
      auto r = evaluate(e, parsed.database, budget.resolve());
      std::cout << render_relation(r.value) << "\n";
      std::cout << constructions::detail::count_summary(r.value) << "\n";
      if (solve_metrics) std::cerr << render_metrics(r.metrics);
      return kOk;
    });
  }

  if (*check_cmd) {
    return guarded([&] {
      auto parsed = load_database(check_db);
      auto report = typecheck_database(parsed.database, parsed.schema);
      if (!report.ok()) {
        for (const auto& p : report.violations) std::cerr << "error: " << p << "\n";
        return int(kUserError);
      }
      std::cout << "database ok: " << parsed.database.domain().size() << " atoms, "
                << parsed.database.relations().size() << " relations\n";
      if (check_expr || check_file) {
        Expr e = expression_from(check_expr, check_file);
        require_bindings(e);
        std::cout << to_string(infer_type(e, parsed.schema)) << "\n";
      }
      return int(kOk);
    });
  }

  if (*cons_cmd) {
    return guarded([&] {
      if (cons_list) {
        for (const auto& c : constructions::registry()) std::cout << c.name << "  " << c.description << "\n";
        return int(kOk);
      }
      if (cons_name.empty()) throw UsageError("--name is required (see --list)");
      const auto* c = constructions::find_construction(cons_name);
      if (!c) throw UsageError("unknown construction '" + cons_name + "' (see --list)");
      if (cons_db.empty()) throw UsageError("--db is required");
      auto parsed = load_database(cons_db);
      for (const auto& [name, type] : c->schema) {
        const Relation* r = parsed.database.find(name);
        if (!r) throw UsageError(c->name + " needs relation " + name + ":" + to_string(type));
        if (!(r->type() == type))
          throw UsageError(c->name + " needs " + name + " of type " + to_string(type) + ", got " + to_string(r->type()));
      }
      auto out = c->run(parsed.database, budget.resolve(), cons_verify);
      std::cout << "expression " << out.expression << "\n";
      std::cout << "result     " << render_relation(out.result) << "\n";
      std::cout << "summary    " << out.summary << "\n";
      if (cons_metrics) std::cerr << render_metrics(out.metrics);
      if (out.verified) {
        std::cout << (out.pass ? "PASS" : "FAIL") << " " << out.oracle << "\n";
        return out.pass ? int(kOk) : int(kInternal);
      }
      return int(kOk);
    });
  }

  if (*prof_cmd) {
    return guarded([&] {
      auto [lo, hi] = parse_range(prof_range);
      Expr e = expr::dom();
      Schema schema;
      std::string subject = prof_eq;
      if (const auto* c = constructions::find_construction(prof_eq)) {
        e = c->expression();
        schema = c->schema;
        if (!prof_relations.empty()) throw UsageError("--relation applies only to expression files");
      } else {
        e = parse_expr(read_file(prof_eq));
        for (const auto& s : prof_relations) {
          auto [name, type] = parse_schema_entry(s);
          if (!schema.emplace(name, type).second) throw UsageError("relation " + name + " given twice");
        }
      }
      std::string gen_spec = prof_gen.empty() ? (schema.empty() ? "domain-only" : "random-flat") : prof_gen;
      auto gen = DbGenerator::parse(gen_spec, schema, prof_seed);
      auto report = e.op() == Op::solve
                        ? profile(e, subject, gen, lo, hi, budget.resolve(), prof_jobs)
                        : meter_expression(e, subject, gen, lo, hi, budget.resolve(), prof_jobs);
      std::cout << render_table(report, prof_timing);
      if (prof_out) {
        std::ofstream f(*prof_out, std::ios::binary);
        if (!f) throw UsageError("cannot write " + *prof_out);
        f << render_report(report);
      }
      return report.truncated ? int(kBudget) : int(kOk);
    });
  }

  if (*repl_cmd) {
    return guarded([&] {
      Repl repl(budget.resolve());
      if (repl_db) repl.load(*repl_db);
      return repl.run(std::cin);
    });
  }

  if (*acc_cmd) {
    bool all_pass = true;
    for (const auto& c : acceptance::criteria()) {
      if (!acc_only.empty() && std::find(acc_only.begin(), acc_only.end(), c.id) == acc_only.end()) continue;
      auto r = c.run();
      std::cout << acceptance::format_line(r) << std::endl;
      all_pass = all_pass && r.pass();
    }
    return all_pass ? kOk : kInternal;
  }
  return kUserError;
}
