#ifndef EQALG_ERROR_HPP
#define EQALG_ERROR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace eqalg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violation of a data-model invariant (bad type, heterogeneous tuples,
/// atom outside the domain, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Malformed surface syntax. Carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Ill-typed operator application. `path()` names the offending node.
class TypeError : public Error {
 public:
  TypeError(std::string path, const std::string& message)
      : Error("type error at " + path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Free/bound name clash or rebinding.
class BindingError : public Error {
 public:
  using Error::Error;
};

/// One of the evaluation caps was hit.
class BudgetExceeded : public Error {
 public:
  enum class Cap { candidates, space, solutions };

  BudgetExceeded(Cap cap, std::string node, const std::string& detail,
                 std::uint64_t candidates_tested = 0, std::uint64_t solutions_found = 0)
      : Error(std::string("budget exceeded (") + cap_name(cap) + ") at " + node + ": " + detail),
        cap_(cap),
        node_(std::move(node)),
        candidates_tested_(candidates_tested),
        solutions_found_(solutions_found) {}

  Cap cap() const { return cap_; }
  const std::string& node() const { return node_; }
  /// Partial counts of the innermost solve in progress when the cap was hit.
  std::uint64_t candidates_tested() const { return candidates_tested_; }
  std::uint64_t solutions_found() const { return solutions_found_; }

  static const char* cap_name(Cap cap) {
    switch (cap) {
      case Cap::candidates: return "max_candidates";
      case Cap::space: return "max_space_units";
      case Cap::solutions: return "max_solutions";
    }
    return "?";
  }

 private:
  Cap cap_;
  std::string node_;
  std::uint64_t candidates_tested_;
  std::uint64_t solutions_found_;
};

/// An invariant that typechecking should have guaranteed did not hold.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace eqalg

#endif  // EQALG_ERROR_HPP
