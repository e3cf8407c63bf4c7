#ifndef EQALG_EQALG_HPP
#define EQALG_EQALG_HPP

// Everything: model, expressions, typechecking, parsing, evaluation,
// constructions and the profiler.

#include "eqalg/ast.hpp"
#include "eqalg/constructions.hpp"
#include "eqalg/error.hpp"
#include "eqalg/eval.hpp"
#include "eqalg/model.hpp"
#include "eqalg/operators.hpp"
#include "eqalg/parser.hpp"
#include "eqalg/profiler.hpp"
#include "eqalg/registry.hpp"
#include "eqalg/typecheck.hpp"

#endif  // EQALG_EQALG_HPP
