#ifndef EQALG_EVAL_HPP
#define EQALG_EVAL_HPP

// Evaluation by the natural strategy: every operator first materializes its
// operands and then combines them; a solve node enumerates candidate
// assignments one at a time, reusing the same space, evaluates both sides
// of the equation for each, and accumulates the solutions.
//
// Space is metered in units (tuple count plus atom occurrences) over every
// live intermediate result: operand results, the current solve candidate,
// and the solutions accumulated so far. Relations looked up by name are
// inputs and cost nothing.

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eqalg/ast.hpp"
#include "eqalg/error.hpp"
#include "eqalg/model.hpp"
#include "eqalg/operators.hpp"
#include "eqalg/typecheck.hpp"

namespace eqalg {

struct EvalBudget {
  /// Cap on the candidate space of a single solve execution.
  BigInt max_candidates{10'000'000};
  /// Cap on the total size of live intermediate results.
  std::uint64_t max_space_units = 10'000'000;
  /// Cap on the solutions of a single solve execution.
  std::uint64_t max_solutions = 1'000'000;
};

/// Counters for one solve node, summed over all of its executions.
struct SolveStats {
  std::string path;
  std::string variables;
  BigInt candidate_space;  ///< per execution
  std::uint64_t executions = 0;
  std::uint64_t candidates_tested = 0;
  std::uint64_t solutions_found = 0;
};

struct EvalMetrics {
  std::uint64_t peak_space_units = 0;
  /// In order of first execution.
  std::vector<SolveStats> solves;

  const SolveStats* find(const std::string& path) const {
    for (const auto& s : solves)
      if (s.path == path) return &s;
    return nullptr;
  }
};

struct EvalResult {
  Relation value;
  EvalMetrics metrics;
};

inline std::string render_binders(const std::vector<Binder>& binders) {
  std::string out;
  for (const auto& b : binders) {
    if (!out.empty()) out += ',';
    out += b.name + ":" + to_string(b.type);
  }
  return out;
}

/// Single-threaded evaluator over one database. Expressions must already be
/// type-checked and binding-checked; see evaluate() for the checked entry
/// point.
class Evaluator {
 public:
  explicit Evaluator(const Database& db, EvalBudget budget = {}) : db_(db), budget_(std::move(budget)) {}

  Relation evaluate(const Expr& e) {
    path_.clear();
    Held h = eval(e);
    return std::move(h.value);
  }

  /// True iff the solve expression `e` has a solution; stops at the first.
  bool nonempty(const Expr& e) {
    if (e.op() != Op::solve) throw ModelError("nonempty: expression is not a solve");
    path_.clear();
    return !eval_solve(e, true).value.empty();
  }

  EvalMetrics metrics() const {
    EvalMetrics m;
    m.peak_space_units = peak_;
    for (const auto* node : solve_order_) m.solves.push_back(stats_.at(node));
    return m;
  }

  std::uint64_t live_space_units() const { return live_; }

 private:
  class Lease {
   public:
    Lease() = default;
    Lease(Evaluator* ev, std::uint64_t units) : ev_(ev) { grow(units); }
    Lease(Lease&& o) noexcept : ev_(o.ev_), units_(o.units_) { o.units_ = 0; }
    Lease& operator=(Lease&& o) noexcept {
      if (this != &o) {
        release();
        ev_ = o.ev_;
        units_ = o.units_;
        o.units_ = 0;
      }
      return *this;
    }
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;
    ~Lease() { release(); }

    void grow(std::uint64_t units) {
      ev_->acquire(units);
      units_ += units;
    }
    void release() {
      if (ev_ && units_) ev_->live_ -= units_;
      units_ = 0;
    }

   private:
    Evaluator* ev_ = nullptr;
    std::uint64_t units_ = 0;
  };

  struct Held {
    Relation value;
    Lease lease;
  };

  struct Frame {
    std::uint64_t tested = 0;
    std::uint64_t found = 0;
  };

  std::string path_string() const {
    std::string s = "$";
    for (auto i : path_) s += "." + std::to_string(i);
    return s;
  }

  void acquire(std::uint64_t units) {
    live_ += units;
    if (live_ > peak_) peak_ = live_;
    if (live_ > budget_.max_space_units) {
      auto live = live_;
      live_ -= units;
      throw BudgetExceeded(BudgetExceeded::Cap::space, path_string(),
                           std::to_string(live) + " live units > " + std::to_string(budget_.max_space_units),
                           frames_.empty() ? 0 : frames_.back().tested, frames_.empty() ? 0 : frames_.back().found);
    }
  }

  Held materialize(Relation r) {
    Lease l(this, r.size_units());
    return {std::move(r), std::move(l)};
  }

  Held operand(const Expr& e, std::size_t i) {
    path_.push_back(static_cast<std::uint32_t>(i + 1));
    Held h = eval(e.operand(i));
    path_.pop_back();
    return h;
  }

  Held eval(const Expr& e) {
    switch (e.op()) {
      case Op::name: {
        auto it = bindings_.find(e.name());
        if (it != bindings_.end()) return {it->second, Lease()};
        const Relation* r = db_.find(e.name());
        if (!r) throw InternalError("unbound relation name " + e.name() + " at " + path_string());
        return {*r, Lease()};
      }
      case Op::domain: return materialize(db_.domain_relation());
      case Op::union_: {
        Held a = operand(e, 0), b = operand(e, 1);
        return materialize(op_union(a.value, b.value));
      }
      case Op::difference: {
        Held a = operand(e, 0), b = operand(e, 1);
        return materialize(op_difference(a.value, b.value));
      }
      case Op::product: {
        Held a = operand(e, 0), b = operand(e, 1);
        return materialize(op_product(a.value, b.value));
      }
      case Op::project: {
        Held a = operand(e, 0);
        return materialize(op_project(a.value, e.columns()));
      }
      case Op::select: {
        Held a = operand(e, 0);
        return materialize(op_select(a.value, e.columns()[0], e.comparison(), e.columns()[1]));
      }
      case Op::nest: {
        Held a = operand(e, 0);
        return materialize(op_nest(a.value, e.columns()));
      }
      case Op::unnest: {
        Held a = operand(e, 0);
        return materialize(op_unnest(a.value, e.columns()[0]));
      }
      case Op::powerset: {
        Held a = operand(e, 0);
        BigInt units = powerset_size_units(a.value);
        if (live_ + units > budget_.max_space_units)
          throw BudgetExceeded(BudgetExceeded::Cap::space, path_string(),
                               "powerset of " + std::to_string(a.value.size()) + " tuples needs " + units.str() +
                                   " units",
                               frames_.empty() ? 0 : frames_.back().tested, frames_.empty() ? 0 : frames_.back().found);
        return materialize(op_powerset(a.value));
      }
      case Op::solve: return eval_solve(e, false);
    }
    throw InternalError("unhandled operator");
  }

  SolveStats& stats_for(const Expr& e) {
    auto [it, inserted] = stats_.try_emplace(e.node());
    if (inserted) {
      it->second.path = path_string();
      it->second.variables = render_binders(e.binders());
      solve_order_.push_back(e.node());
    }
    return it->second;
  }

  /// Binds solve variables for the lifetime of the guard.
  class Bindings {
   public:
    Bindings(Evaluator& ev, const std::vector<Binder>& binders) : ev_(ev), binders_(binders) {}
    ~Bindings() {
      for (const auto& b : binders_) ev_.bindings_.erase(b.name);
    }
    void set(std::size_t i, const Relation& r) { ev_.bindings_.insert_or_assign(binders_[i].name, r); }

   private:
    Evaluator& ev_;
    const std::vector<Binder>& binders_;
  };

  Held eval_solve(const Expr& e, bool stop_at_first) {
    const auto& binders = e.binders();
    const std::size_t n = db_.domain().size();

    // The candidate space is 2^(sum of tuple-universe sizes).
    BigInt universe_bits = 0;
    for (const auto& b : binders) {
      auto m = tuple_universe_size(b.type, n);
      if (!m) {
        universe_bits = kMaxCountBits;
        break;
      }
      universe_bits += *m;
    }
    if (universe_bits >= kMaxCountBits || (BigInt(1) << static_cast<std::size_t>(universe_bits)) > budget_.max_candidates)
      throw BudgetExceeded(BudgetExceeded::Cap::candidates, path_string(),
                           "candidate space 2^" + universe_bits.str() + " for (" + render_binders(binders) +
                               ") exceeds " + budget_.max_candidates.str());
    BigInt space = BigInt(1) << static_cast<std::size_t>(universe_bits);

    SolveStats& stats = stats_for(e);
    stats.candidate_space = space;
    ++stats.executions;

    std::vector<RelationEnumerator> enums;
    std::vector<Relation> current;
    enums.reserve(binders.size());
    for (const auto& b : binders) {
      enums.emplace_back(b.type, db_.domain());
      current.push_back(*enums.back().next());
    }

    Bindings bound(*this, binders);
    auto candidate_units = [&] {
      std::uint64_t u = 0;
      for (const auto& r : current) u += r.size_units();
      return u;
    };
    for (std::size_t i = 0; i < binders.size(); ++i) bound.set(i, current[i]);
    Lease candidate(this, candidate_units());

    std::vector<RelationType> out_comps;
    for (const auto& b : binders) out_comps.push_back(b.type);
    RelationType out_type = RelationType::tuple(std::move(out_comps));

    std::vector<Value> solutions;
    Lease accumulated(this, 0);
    frames_.push_back({});
    struct PopFrame {
      std::vector<Frame>& frames;
      ~PopFrame() { frames.pop_back(); }
    } pop{frames_};

    while (true) {
      ++stats.candidates_tested;
      ++frames_.back().tested;
      bool is_solution;
      {
        Held lhs = operand(e, 0);
        Held rhs = operand(e, 1);
        is_solution = lhs.value == rhs.value;
      }
      if (is_solution) {
        ++stats.solutions_found;
        if (++frames_.back().found > budget_.max_solutions)
          throw BudgetExceeded(BudgetExceeded::Cap::solutions, path_string(),
                               "more than " + std::to_string(budget_.max_solutions) + " solutions",
                               frames_.back().tested, frames_.back().found);
        for (const auto& r : current) solutions.emplace_back(r);
        accumulated.grow(1 + candidate_units());
        if (stop_at_first) break;
      }

      // Odometer step, first variable fastest.
      std::size_t i = 0;
      for (; i < enums.size(); ++i) {
        if (auto next = enums[i].next()) {
          current[i] = std::move(*next);
          break;
        }
        enums[i].reset();
        current[i] = *enums[i].next();
      }
      if (i == enums.size()) break;
      for (std::size_t k = 0; k <= i; ++k) bound.set(k, current[k]);
      candidate = Lease();
      candidate = Lease(this, candidate_units());
    }

    Relation result = Relation::from_cells(out_type, std::move(solutions));
    return {std::move(result), std::move(accumulated)};
  }

  const Database& db_;
  EvalBudget budget_;
  std::unordered_map<std::string, Relation> bindings_;
  std::vector<std::uint32_t> path_;
  std::vector<Frame> frames_;
  std::map<const ExprNode*, SolveStats> stats_;
  std::vector<const ExprNode*> solve_order_;
  std::uint64_t live_ = 0;
  std::uint64_t peak_ = 0;
};

namespace detail {

inline RelationType check_expression(const Expr& e, const Database& db) {
  require_bindings(e);
  return infer_type(e, db.schema());
}

inline EvalResult run_checked(const Expr& e, const Database& db, const EvalBudget& budget) {
  RelationType type = check_expression(e, db);
  Evaluator ev(db, budget);
  Relation value = [&] {
    try {
      return ev.evaluate(e);
    } catch (const ModelError& err) {
      throw InternalError(std::string("evaluation of a well-typed expression failed: ") + err.what());
    }
  }();
  if (!(value.type() == type))
    throw InternalError("result type " + to_string(value.type()) + " differs from inferred type " + to_string(type));
  return {std::move(value), ev.metrics()};
}

}  // namespace detail

/// Binding-checks, type-checks and evaluates `e` on `db`.
inline EvalResult evaluate(const Expr& e, const Database& db, const EvalBudget& budget = {}) {
  return detail::run_checked(e, db, budget);
}

/// All solutions of lhs = rhs over `vars`, as a relation of type (t1,...,tp).
inline EvalResult solve(std::vector<Binder> vars, const Expr& lhs, const Expr& rhs, const Database& db,
                        const EvalBudget& budget = {}) {
  return evaluate(expr::solve(std::move(vars), lhs, rhs), db, budget);
}

/// Whether the solve expression has any solution on `db`; stops at the first.
inline bool solve_nonempty(const Expr& solve_expr, const Database& db, const EvalBudget& budget = {}) {
  detail::check_expression(solve_expr, db);
  Evaluator ev(db, budget);
  try {
    return ev.nonempty(solve_expr);
  } catch (const ModelError& err) {
    throw InternalError(std::string("evaluation of a well-typed expression failed: ") + err.what());
  }
}

inline bool solve_nonempty(std::vector<Binder> vars, const Expr& lhs, const Expr& rhs, const Database& db,
                           const EvalBudget& budget = {}) {
  return solve_nonempty(expr::solve(std::move(vars), lhs, rhs), db, budget);
}

}  // namespace eqalg

#endif  // EQALG_EVAL_HPP
