#ifndef EQALG_PARSER_HPP
#define EQALG_PARSER_HPP

// Surface syntax for types, expressions, relation values and database
// documents, together with the matching renderers. The grammar is spelled
// out in docs/grammar.ebnf. Rendering is canonical: parsing a rendered
// expression or database gives back an equal one.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqalg/ast.hpp"
#include "eqalg/error.hpp"
#include "eqalg/model.hpp"

namespace eqalg {

//---------------------------------------------------------------------------
// Rendering
//---------------------------------------------------------------------------

inline std::string render_type(const RelationType& t) { return to_string(t); }

inline void render_value_to(std::string& out, const Value& v);

inline void render_relation_to(std::string& out, const Relation& r) {
  out += '[';
  bool first_tuple = true;
  for (auto t : r) {
    if (!first_tuple) out += ',';
    first_tuple = false;
    out += '[';
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ',';
      render_value_to(out, t[i]);
    }
    out += ']';
  }
  out += ']';
}

inline void render_value_to(std::string& out, const Value& v) {
  if (v.is_atom())
    out += v.atom().str();
  else
    render_relation_to(out, v.relation());
}

/// Nested lists in canonical order, e.g. `[[a,b],[b,c]]`; the empty relation is `[]`.
inline std::string render_relation(const Relation& r) {
  std::string out;
  render_relation_to(out, canonicalize(r).relation());
  return out;
}

inline std::string render_value(const Value& v) {
  std::string out;
  render_value_to(out, canonicalize(v));
  return out;
}

inline std::string render_expr(const Expr& e) {
  auto columns = [](const std::vector<std::size_t>& cols) {
    std::string s = "[";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(cols[i]);
    }
    return s + "]";
  };
  switch (e.op()) {
    case Op::name: return e.name();
    case Op::domain: return "D";
    case Op::union_:
    case Op::difference:
    case Op::product:
      return std::string(op_keyword(e.op())) + "(" + render_expr(e.operand(0)) + "," + render_expr(e.operand(1)) + ")";
    case Op::project:
    case Op::nest:
    case Op::unnest: return op_keyword(e.op()) + columns(e.columns()) + "(" + render_expr(e.operand(0)) + ")";
    case Op::select:
      return "select[" + std::to_string(e.columns()[0]) + (e.comparison() == Comparison::eq ? "=" : "!=") +
             std::to_string(e.columns()[1]) + "](" + render_expr(e.operand(0)) + ")";
    case Op::powerset: return "powerset(" + render_expr(e.operand(0)) + ")";
    case Op::solve: {
      std::string s = "solve{(";
      for (std::size_t i = 0; i < e.binders().size(); ++i) {
        if (i) s += ',';
        s += e.binders()[i].name + ":" + to_string(e.binders()[i].type);
      }
      return s + ") | " + render_expr(e.operand(0)) + " = " + render_expr(e.operand(1)) + "}";
    }
  }
  return "?";
}

inline std::string render_database(const Database& db) {
  std::string out = "domain [";
  for (std::size_t i = 0; i < db.domain().size(); ++i) {
    if (i) out += ',';
    out += db.domain()[i].str();
  }
  out += "]\nrelations {\n";
  for (const auto& [name, rel] : db.relations())
    out += "  " + name + " : " + to_string(rel.type()) + " = " + render_relation(rel) + "\n";
  out += "}\n";
  return out;
}

//---------------------------------------------------------------------------
// Lexing
//---------------------------------------------------------------------------

namespace detail {

struct Token {
  enum Kind { word, punct, end } kind = end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Words are runs of [A-Za-z0-9_]; "!=" is one token; '#' starts a comment.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t s = 0; s < k; ++s, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (is_word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j])) ++j;
      t.kind = Token::word;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '!' && i + 1 < text.size() && text[i + 1] == '=') {
      t.kind = Token::punct;
      t.text = "!=";
      advance(2);
    } else if (std::string_view("()[]{},:|=").find(c) != std::string_view::npos) {
      t.kind = Token::punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token e;
  e.line = line;
  e.column = col;
  out.push_back(e);
  return out;
}

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace detail

/// A bracketed list tree: either a word or a list of trees.
struct ListNode {
  bool is_list = false;
  std::string word;
  std::vector<ListNode> items;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(detail::tokenize(text)) {}

  bool at_end() const { return peek().kind == detail::Token::end; }

  void expect_end() {
    if (!at_end()) fail(peek(), "unexpected '" + peek().text + "' after end of input");
  }

  RelationType parse_type() {
    const auto& t = peek();
    if (t.kind == detail::Token::word && t.text == "0") {
      ++pos_;
      return RelationType::atom();
    }
    expect("(");
    std::vector<RelationType> comps{parse_type()};
    while (accept(",")) comps.push_back(parse_type());
    expect(")");
    return RelationType::tuple(std::move(comps));
  }

  Expr parse_expr() {
    const detail::Token& t = peek();
    if (accept("(")) {
      Expr e = parse_expr();
      expect(")");
      return e;
    }
    if (t.kind != detail::Token::word) fail(t, "expected an expression, found " + describe(t));
    const detail::Token start = t;
    const std::string w = t.text;
    ++pos_;
    try {
      if (w == "D") return expr::dom();
      if (w == "union" || w == "minus" || w == "times") {
        expect("(");
        Expr a = parse_expr();
        expect(",");
        Expr b = parse_expr();
        expect(")");
        if (w == "union") return expr::unite(std::move(a), std::move(b));
        if (w == "minus") return expr::minus(std::move(a), std::move(b));
        return expr::times(std::move(a), std::move(b));
      }
      if (w == "project" || w == "nest") {
        auto cols = parse_columns();
        Expr e = parse_argument();
        return w == "project" ? expr::project(std::move(cols), std::move(e)) : expr::nest(std::move(cols), std::move(e));
      }
      if (w == "unnest") {
        expect("[");
        auto i = parse_index();
        expect("]");
        return expr::unnest(i, parse_argument());
      }
      if (w == "select") {
        expect("[");
        auto i = parse_index();
        Comparison cmp = Comparison::eq;
        if (accept("!="))
          cmp = Comparison::ne;
        else
          expect("=");
        auto j = parse_index();
        expect("]");
        return expr::select(i, cmp, j, parse_argument());
      }
      if (w == "powerset") return expr::powerset(parse_argument());
      if (w == "solve") return parse_solve();
      if (w == "empty") fail(start, "'empty' may only appear as the right-hand side of an equation");
      const auto& next = peek();
      if (next.kind == detail::Token::punct && (next.text == "(" || next.text == "[" || next.text == "{"))
        fail(start, "unknown keyword '" + w + "'");
      if (!is_valid_relation_name(w)) fail(start, "invalid relation name '" + w + "'");
      return expr::rel(w);
    } catch (const ModelError& err) {
      fail(start, err.what());
    }
  }

  ListNode parse_list_node() {
    const auto& t = peek();
    ListNode n;
    n.line = t.line;
    n.column = t.column;
    if (t.kind == detail::Token::word) {
      n.word = t.text;
      ++pos_;
      return n;
    }
    expect("[");
    n.is_list = true;
    if (!accept("]")) {
      n.items.push_back(parse_list_node());
      while (accept(",")) n.items.push_back(parse_list_node());
      expect("]");
    }
    return n;
  }

  /// Converts a list tree to a relation of `type`; atoms must be in `domain`
  /// when `domain` is non-null.
  static Relation to_relation(const ListNode& n, const RelationType& type, const std::set<std::string>* domain) {
    if (!n.is_list) throw ParseError(n.line, n.column, "expected a relation of type " + to_string(type) + ", found '" + n.word + "'");
    std::vector<Value> cells;
    for (const auto& tuple : n.items) {
      if (!tuple.is_list) throw ParseError(tuple.line, tuple.column, "expected a tuple, found '" + tuple.word + "'");
      if (tuple.items.size() != type.arity())
        throw ParseError(tuple.line, tuple.column,
                         "tuple has " + std::to_string(tuple.items.size()) + " components, type " + to_string(type) +
                             " needs " + std::to_string(type.arity()));
      for (std::size_t i = 0; i < type.arity(); ++i) {
        const ListNode& c = tuple.items[i];
        if (type[i].is_atom()) {
          if (c.is_list) throw ParseError(c.line, c.column, "expected an atom, found a list");
          if (!is_valid_atom(c.word)) throw ParseError(c.line, c.column, "invalid atom '" + c.word + "'");
          if (domain && !domain->count(c.word))
            throw ParseError(c.line, c.column, "atom '" + c.word + "' is not in the domain");
          cells.emplace_back(Atom(c.word));
        } else {
          cells.emplace_back(to_relation(c, type[i], domain));
        }
      }
    }
    return Relation::from_cells(type, std::move(cells));
  }

  const detail::Token& peek() const { return tokens_[pos_]; }

  bool accept(std::string_view punct) {
    if (peek().kind == detail::Token::punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view w) {
    if (peek().kind == detail::Token::word && peek().text == w) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(std::string_view punct) {
    if (!accept(punct)) fail(peek(), "expected '" + std::string(punct) + "', found " + describe(peek()));
  }

  std::string expect_word(const char* what) {
    if (peek().kind != detail::Token::word) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return tokens_[pos_++].text;
  }

  [[noreturn]] static void fail(const detail::Token& t, const std::string& message) {
    throw ParseError(t.line, t.column, message);
  }

 private:
  static std::string describe(const detail::Token& t) {
    if (t.kind == detail::Token::end) return "end of input";
    return "'" + t.text + "'";
  }

  std::size_t parse_index() {
    const auto& t = peek();
    if (t.kind != detail::Token::word || !detail::all_digits(t.text)) fail(t, "expected a column index, found " + describe(t));
    if (t.text.size() > 9) fail(t, "column index too large");
    std::size_t v = std::stoul(t.text);
    if (v == 0) fail(t, "column indices are 1-based");
    ++pos_;
    return v;
  }

  std::vector<std::size_t> parse_columns() {
    expect("[");
    std::vector<std::size_t> cols{parse_index()};
    while (accept(",")) cols.push_back(parse_index());
    expect("]");
    return cols;
  }

  Expr parse_argument() {
    expect("(");
    Expr e = parse_expr();
    expect(")");
    return e;
  }

  Expr parse_solve() {
    expect("{");
    expect("(");
    std::vector<Binder> binders;
    do {
      const auto& t = peek();
      std::string name = expect_word("a variable name");
      if (!is_valid_relation_name(name)) fail(t, "invalid variable name '" + name + "'");
      expect(":");
      binders.push_back({name, parse_type()});
    } while (accept(","));
    expect(")");
    expect("|");
    Expr lhs = parse_expr();
    bool negated = false;
    if (accept("!="))
      negated = true;
    else
      expect("=");
    const auto rhs_token = peek();
    std::optional<Expr> rhs;
    if (!accept_word("empty")) rhs = parse_expr();
    expect("}");
    if (negated) {
      if (rhs) fail(rhs_token, "'!=' is only allowed with 'empty' on the right-hand side");
      return solve_disequation(std::move(binders), lhs);
    }
    return expr::solve(std::move(binders), lhs, rhs ? *rhs : empty_literal(lhs));
  }

  std::vector<detail::Token> tokens_;
  std::size_t pos_ = 0;
};

//---------------------------------------------------------------------------
// Entry points
//---------------------------------------------------------------------------

inline RelationType parse_type(std::string_view text) {
  Parser p(text);
  auto t = p.parse_type();
  p.expect_end();
  return t;
}

inline Expr parse_expr(std::string_view text) {
  Parser p(text);
  try {
    auto e = p.parse_expr();
    p.expect_end();
    return e;
  } catch (const ModelError& err) {
    throw ParseError(1, 1, err.what());
  }
}

/// A relation literal of a known type (atoms are not checked against a domain).
inline Relation parse_relation(std::string_view text, const RelationType& type) {
  Parser p(text);
  auto node = p.parse_list_node();
  p.expect_end();
  return Parser::to_relation(node, type, nullptr);
}

struct ParsedDatabase {
  Database database;
  Schema schema;
};

/// Reads
///
///     domain [a, b, c]
///     relations {
///       R : (0,0) = [[a,b],[b,c]]
///     }
///
/// The relations block is optional.
inline ParsedDatabase parse_database(std::string_view text) {
  Parser p(text);
  if (!p.accept_word("domain")) Parser::fail(p.peek(), "expected 'domain'");
  ListNode dom = p.parse_list_node();
  if (!dom.is_list) throw ParseError(dom.line, dom.column, "the domain must be a list of atoms");
  if (dom.items.empty()) throw ParseError(dom.line, dom.column, "the domain must be non-empty");
  std::set<std::string> domain_names;
  std::vector<Atom> domain;
  for (const auto& a : dom.items) {
    if (a.is_list || !is_valid_atom(a.word)) throw ParseError(a.line, a.column, "invalid atom in domain");
    if (!domain_names.insert(a.word).second) throw ParseError(a.line, a.column, "duplicate atom '" + a.word + "'");
    domain.emplace_back(a.word);
  }
  std::map<std::string, Relation> relations;
  Schema schema;
  if (p.accept_word("relations")) {
    p.expect("{");
    while (!p.accept("}")) {
      const auto name_token = p.peek();
      std::string name = p.expect_word("a relation name or '}'");
      if (!is_valid_relation_name(name)) Parser::fail(name_token, "invalid relation name '" + name + "'");
      if (schema.count(name)) Parser::fail(name_token, "relation " + name + " declared twice");
      p.expect(":");
      const auto type_token = p.peek();
      RelationType type = p.parse_type();
      if (type.is_atom()) Parser::fail(type_token, "relation " + name + " cannot have the atom type 0");
      p.expect("=");
      ListNode value = p.parse_list_node();
      relations.emplace(name, Parser::to_relation(value, type, &domain_names));
      schema.emplace(name, type);
    }
  }
  p.expect_end();
  return {Database(std::move(domain), std::move(relations)), std::move(schema)};
}

}  // namespace eqalg

#endif  // EQALG_PARSER_HPP
