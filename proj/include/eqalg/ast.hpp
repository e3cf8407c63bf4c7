#ifndef EQALG_AST_HPP
#define EQALG_AST_HPP

// Expressions of the equation algebra: the nested relational algebra plus
// the solution operator solve{(X1:t1,...,Xp:tp) | lhs = rhs}.
//
// Column indices are 1-based throughout. Node paths are written "$" for the
// root and "$.i" for the i-th operand of a node (a solve node has the
// equation sides as operands 1 and 2).

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "eqalg/error.hpp"
#include "eqalg/model.hpp"

namespace eqalg {

enum class Op { name, domain, union_, difference, product, project, select, nest, unnest, powerset, solve };

enum class Comparison { eq, ne };

/// A solve variable and its declared type.
struct Binder {
  std::string name;
  RelationType type;

  friend bool operator==(const Binder&, const Binder&) = default;
};

/// Surface keyword of each operator ("name" and "D" for the leaves).
inline const char* op_keyword(Op op) {
  switch (op) {
    case Op::name: return "name";
    case Op::domain: return "D";
    case Op::union_: return "union";
    case Op::difference: return "minus";
    case Op::product: return "times";
    case Op::project: return "project";
    case Op::select: return "select";
    case Op::nest: return "nest";
    case Op::unnest: return "unnest";
    case Op::powerset: return "powerset";
    case Op::solve: return "solve";
  }
  return "?";
}

inline bool is_reserved_word(std::string_view w) {
  static const char* const words[] = {"D",      "union", "minus",  "times",    "project", "select",
                                      "nest",   "unnest", "powerset", "solve", "empty"};
  return std::any_of(std::begin(words), std::end(words), [&](const char* k) { return w == k; });
}

inline bool is_valid_relation_name(std::string_view s) {
  if (s.empty() || is_reserved_word(s)) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

struct ExprNode;

/// Immutable, shareable expression handle.
class Expr {
 public:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  Op op() const;
  /// Relation name (Op::name only).
  const std::string& name() const;
  /// Column list of project/nest, {i} for unnest, {i, j} for select.
  const std::vector<std::size_t>& columns() const;
  Comparison comparison() const;
  const std::vector<Binder>& binders() const;
  const std::vector<Expr>& operands() const;
  const Expr& operand(std::size_t i) const { return operands()[i]; }

  const ExprNode* node() const { return node_.get(); }

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::domain;
  std::string name;
  std::vector<std::size_t> columns;
  Comparison comparison = Comparison::eq;
  std::vector<Binder> binders;
  std::vector<Expr> operands;
};

inline Op Expr::op() const { return node_->op; }
inline const std::string& Expr::name() const { return node_->name; }
inline const std::vector<std::size_t>& Expr::columns() const { return node_->columns; }
inline Comparison Expr::comparison() const { return node_->comparison; }
inline const std::vector<Binder>& Expr::binders() const { return node_->binders; }
inline const std::vector<Expr>& Expr::operands() const { return node_->operands; }

/// Structural equality.
inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  return a.op() == b.op() && a.name() == b.name() && a.columns() == b.columns() &&
         a.comparison() == b.comparison() && a.binders() == b.binders() && a.operands() == b.operands();
}

/// Builders. Each validates the node-local invariants (positive indices,
/// distinct non-atom binders, legal names).
namespace expr {

namespace detail {

inline Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

inline void check_columns(const std::vector<std::size_t>& cols, const char* op) {
  if (cols.empty()) throw ModelError(std::string(op) + " needs at least one column");
  for (auto c : cols)
    if (c == 0) throw ModelError(std::string(op) + ": column indices are 1-based");
}

inline Expr binary(Op op, Expr a, Expr b) {
  ExprNode n;
  n.op = op;
  n.operands = {std::move(a), std::move(b)};
  return make(std::move(n));
}

}  // namespace detail

inline Expr rel(std::string name) {
  if (!is_valid_relation_name(name)) throw ModelError("invalid relation name '" + name + "'");
  ExprNode n;
  n.op = Op::name;
  n.name = std::move(name);
  return detail::make(std::move(n));
}

inline Expr dom() { return detail::make(ExprNode{}); }

inline Expr unite(Expr a, Expr b) { return detail::binary(Op::union_, std::move(a), std::move(b)); }
inline Expr minus(Expr a, Expr b) { return detail::binary(Op::difference, std::move(a), std::move(b)); }
inline Expr times(Expr a, Expr b) { return detail::binary(Op::product, std::move(a), std::move(b)); }

inline Expr project(std::vector<std::size_t> cols, Expr e) {
  detail::check_columns(cols, "project");
  ExprNode n;
  n.op = Op::project;
  n.columns = std::move(cols);
  n.operands = {std::move(e)};
  return detail::make(std::move(n));
}

inline Expr select(std::size_t i, Comparison cmp, std::size_t j, Expr e) {
  detail::check_columns({i, j}, "select");
  ExprNode n;
  n.op = Op::select;
  n.columns = {i, j};
  n.comparison = cmp;
  n.operands = {std::move(e)};
  return detail::make(std::move(n));
}
inline Expr select_eq(std::size_t i, std::size_t j, Expr e) { return select(i, Comparison::eq, j, std::move(e)); }
inline Expr select_ne(std::size_t i, std::size_t j, Expr e) { return select(i, Comparison::ne, j, std::move(e)); }

inline Expr nest(std::vector<std::size_t> cols, Expr e) {
  detail::check_columns(cols, "nest");
  ExprNode n;
  n.op = Op::nest;
  n.columns = std::move(cols);
  n.operands = {std::move(e)};
  return detail::make(std::move(n));
}

inline Expr unnest(std::size_t i, Expr e) {
  detail::check_columns({i}, "unnest");
  ExprNode n;
  n.op = Op::unnest;
  n.columns = {i};
  n.operands = {std::move(e)};
  return detail::make(std::move(n));
}

inline Expr powerset(Expr e) {
  ExprNode n;
  n.op = Op::powerset;
  n.operands = {std::move(e)};
  return detail::make(std::move(n));
}

inline Expr solve(std::vector<Binder> binders, Expr lhs, Expr rhs) {
  if (binders.empty()) throw ModelError("solve needs at least one variable");
  std::set<std::string> seen;
  for (const auto& b : binders) {
    if (!is_valid_relation_name(b.name)) throw ModelError("invalid variable name '" + b.name + "'");
    if (b.type.is_atom()) throw ModelError("variable " + b.name + " cannot have the atom type 0");
    if (!seen.insert(b.name).second) throw ModelError("variable " + b.name + " bound twice by one solve");
  }
  ExprNode n;
  n.op = Op::solve;
  n.binders = std::move(binders);
  n.operands = {std::move(lhs), std::move(rhs)};
  return detail::make(std::move(n));
}

}  // namespace expr

//---------------------------------------------------------------------------
// Traversal and name analysis
//---------------------------------------------------------------------------

inline std::string child_path(const std::string& parent, std::size_t index) {
  return parent + "." + std::to_string(index + 1);
}

/// Pre-order walk with node paths.
inline void for_each_node(const Expr& e, const std::function<void(const Expr&, const std::string&)>& fn,
                          const std::string& path = "$") {
  fn(e, path);
  for (std::size_t i = 0; i < e.operands().size(); ++i) for_each_node(e.operand(i), fn, child_path(path, i));
}

/// Relation names occurring free in `e`.
inline std::set<std::string> free_names(const Expr& e) {
  std::set<std::string> out;
  switch (e.op()) {
    case Op::name: out.insert(e.name()); break;
    case Op::domain: break;
    case Op::solve:
      for (const auto& operand : e.operands()) {
        auto inner = free_names(operand);
        out.insert(inner.begin(), inner.end());
      }
      for (const auto& b : e.binders()) out.erase(b.name);
      break;
    default:
      for (const auto& operand : e.operands()) {
        auto inner = free_names(operand);
        out.insert(inner.begin(), inner.end());
      }
  }
  return out;
}

struct BindingViolation {
  std::string name;
  std::string path;  ///< path of the solve node that binds `name`
  std::string message;
};

struct BindingReport {
  std::vector<BindingViolation> violations;

  bool ok() const { return violations.empty(); }

  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += '\n';
      out += v.message;
    }
    return out;
  }
};

/// Rejects a name that is free in `e` and also bound by some solve inside
/// it, and a solve that rebinds a name already bound by an enclosing solve.
inline BindingReport check_bindings(const Expr& e) {
  BindingReport report;
  const auto free = free_names(e);
  std::vector<std::string> scope;
  std::function<void(const Expr&, const std::string&)> walk = [&](const Expr& node, const std::string& path) {
    std::size_t pushed = 0;
    if (node.op() == Op::solve) {
      for (const auto& b : node.binders()) {
        if (free.count(b.name)) {
          report.violations.push_back(
              {b.name, path, "name " + b.name + " occurs free and is also bound by the solve at " + path});
        } else if (std::find(scope.begin(), scope.end(), b.name) != scope.end()) {
          report.violations.push_back(
              {b.name, path, "solve at " + path + " rebinds " + b.name + ", already bound by an enclosing solve"});
        }
        scope.push_back(b.name);
        ++pushed;
      }
    }
    for (std::size_t i = 0; i < node.operands().size(); ++i) walk(node.operand(i), child_path(path, i));
    scope.resize(scope.size() - pushed);
  };
  walk(e, "$");
  return report;
}

inline void require_bindings(const Expr& e) {
  auto report = check_bindings(e);
  if (!report.ok()) throw BindingError(report.to_string());
}

//---------------------------------------------------------------------------
// Equation forms
//---------------------------------------------------------------------------

struct Equation {
  Expr lhs;
  Expr rhs;
};

/// `body != empty`.
struct Disequation {
  Expr body;
};

/// (a - b) union (b - a).
inline Expr symmetric_difference(const Expr& a, const Expr& b) {
  return expr::unite(expr::minus(a, b), expr::minus(b, a));
}

/// An always-empty expression of the same type as `e`: e - e.
inline Expr empty_literal(const Expr& e) { return expr::minus(e, e); }

/// e != empty  becomes  project[1](times(D, e)) = D.
inline Equation rewrite_diseq_to_eq(const Expr& body) {
  return {expr::project({1}, expr::times(expr::dom(), body)), expr::dom()};
}

/// e1 = e2  becomes  D - project[1](times(D, e1 delta e2)) != empty.
/// Operand types are checked by the overload in typecheck.hpp.
inline Disequation rewrite_eq_to_diseq_unchecked(const Expr& lhs, const Expr& rhs) {
  return {expr::minus(expr::dom(), expr::project({1}, expr::times(expr::dom(), symmetric_difference(lhs, rhs))))};
}

/// solve{(binders) | body != empty}, expressed as an equation.
inline Expr solve_disequation(std::vector<Binder> binders, const Expr& body) {
  auto eq = rewrite_diseq_to_eq(body);
  return expr::solve(std::move(binders), eq.lhs, eq.rhs);
}

}  // namespace eqalg

#endif  // EQALG_AST_HPP
