#ifndef EQALG_TESTS_FIXTURES_HPP
#define EQALG_TESTS_FIXTURES_HPP

#include <random>
#include <string>

#include "eqalg/acceptance.hpp"
#include "eqalg/eqalg.hpp"

namespace eqalg::testing {

using acceptance::make_domain;
using acceptance::Rng;

/// A relation literal like "[[a,b],[b,c]]" of the type written like "(0,0)".
inline Relation R(const std::string& type, const std::string& text) { return parse_relation(text, parse_type(type)); }

inline Database db_of(const std::string& text) { return parse_database(text).database; }

inline std::string show(const Relation& r) { return render_relation(r); }

inline Relation eval_text(const std::string& e, const Database& db, const EvalBudget& b = {}) {
  return evaluate(parse_expr(e), db, b).value;
}

}  // namespace eqalg::testing

#endif  // EQALG_TESTS_FIXTURES_HPP
