#ifndef EQALG_MODEL_HPP
#define EQALG_MODEL_HPP

// Nested relations over a finite domain of opaque atoms.
//
// Every value is immutable once built. Relations keep their tuples in a flat
// row-major cell array; a relation is canonical when its rows are strictly
// increasing under the total value order (which also rules out duplicates)
// and every nested relation inside it is canonical too. All relations
// produced by the evaluator are canonical, so deep set equality reduces to
// comparing canonical forms.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "eqalg/error.hpp"

namespace eqalg {

using BigInt = boost::multiprecision::cpp_int;

//---------------------------------------------------------------------------
// Relation types
//---------------------------------------------------------------------------

/// Either the atom type `0` or a tuple type `(t1,...,tk)` with k >= 1.
class RelationType {
 public:
  /// The atom type.
  RelationType() = default;

  static RelationType atom() { return RelationType(); }

  static RelationType tuple(std::vector<RelationType> components) {
    if (components.empty()) throw ModelError("a tuple type needs at least one component");
    RelationType t;
    t.components_ = std::make_shared<const std::vector<RelationType>>(std::move(components));
    return t;
  }

  bool is_atom() const { return !components_; }
  std::size_t arity() const { return components_ ? components_->size() : 0; }

  std::span<const RelationType> components() const {
    if (!components_) return {};
    return {components_->data(), components_->size()};
  }

  /// 0-based component access.
  const RelationType& operator[](std::size_t i) const { return (*components_)[i]; }

  /// `(0,...,0)`.
  bool is_flat() const {
    return components_ &&
           std::all_of(components_->begin(), components_->end(),
                       [](const RelationType& c) { return c.is_atom(); });
  }

  /// Nesting depth: 0 for the atom type, 1 for flat types.
  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& c : components()) d = std::max(d, c.depth());
    return is_atom() ? 0 : d + 1;
  }

  friend bool operator==(const RelationType& a, const RelationType& b) {
    if (a.components_ == b.components_) return true;
    if (!a.components_ || !b.components_) return false;
    return *a.components_ == *b.components_;
  }

 private:
  std::shared_ptr<const std::vector<RelationType>> components_;
};

/// `(0,...,0)` with the given arity.
inline RelationType flat_type(std::size_t arity) {
  return RelationType::tuple(std::vector<RelationType>(arity, RelationType::atom()));
}

/// Renders a type in the surface syntax, e.g. `(0,(0,0))`.
inline std::string to_string(const RelationType& t) {
  if (t.is_atom()) return "0";
  std::string out = "(";
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    out += to_string(t[i]);
  }
  out += ')';
  return out;
}

//---------------------------------------------------------------------------
// Atoms
//---------------------------------------------------------------------------

inline bool is_valid_atom(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

namespace detail {

inline const std::string* intern(std::string_view s) {
  static std::mutex mutex;
  static std::unordered_set<std::string> table;  // node-based: element addresses are stable
  std::lock_guard lock(mutex);
  return &*table.emplace(s).first;
}

}  // namespace detail

/// An interned atom symbol. Equality is pointer identity; ordering is
/// lexicographic on the symbol text.
class Atom {
 public:
  explicit Atom(std::string_view symbol) {
    if (!is_valid_atom(symbol))
      throw ModelError("invalid atom '" + std::string(symbol) + "' (expected [A-Za-z0-9_]+)");
    symbol_ = detail::intern(symbol);
  }

  const std::string& str() const { return *symbol_; }

  friend bool operator==(Atom a, Atom b) { return a.symbol_ == b.symbol_; }
  friend std::strong_ordering operator<=>(Atom a, Atom b) {
    if (a.symbol_ == b.symbol_) return std::strong_ordering::equal;
    int c = a.symbol_->compare(*b.symbol_);
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

 private:
  friend class Value;
  explicit Atom(const std::string* symbol) : symbol_(symbol) {}
  const std::string* symbol_;
};

//---------------------------------------------------------------------------
// Values and relations
//---------------------------------------------------------------------------

class Relation;
class Value;

namespace detail {
struct RelationData;
}

class Relation {
 public:
  /// The empty relation of `type` (which must not be the atom type).
  explicit Relation(RelationType type);

  const RelationType& type() const;
  std::size_t arity() const;
  /// Number of tuples.
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::span<const Value> tuple(std::size_t i) const;
  std::span<const Value> cells() const;
  /// Tuple count plus recursive atom-occurrence count.
  std::uint64_t size_units() const;
  bool is_canonical() const;
  /// Identity of the shared storage (used to short-circuit comparisons).
  const void* identity() const { return data_.get(); }

  /// Binary search; requires a canonical relation.
  bool contains(std::span<const Value> t) const;

  class iterator {
   public:
    using value_type = std::span<const Value>;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const Relation* r, std::size_t i) : rel_(r), index_(i) {}
    std::span<const Value> operator*() const { return rel_->tuple(index_); }
    iterator& operator++() {
      ++index_;
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++index_;
      return copy;
    }
    bool operator==(const iterator& o) const { return index_ == o.index_; }

   private:
    const Relation* rel_ = nullptr;
    std::size_t index_ = 0;
  };
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size()}; }

  /// Validates every tuple against `type` and returns the canonical form.
  static Relation from_tuples(const RelationType& type, const std::vector<std::vector<Value>>& tuples);
  /// Validates but keeps the given order and duplicates.
  static Relation raw(const RelationType& type, const std::vector<std::vector<Value>>& tuples);
  /// Sorts and deduplicates row-major `cells`. Components must already be
  /// canonical and well-typed.
  static Relation from_cells(const RelationType& type, std::vector<Value> cells);
  /// Adopts row-major `cells` that are already strictly increasing.
  static Relation from_sorted_cells(const RelationType& type, std::vector<Value> cells);

 private:
  friend class Value;
  Relation() = default;
  explicit Relation(std::shared_ptr<const detail::RelationData> data) : data_(std::move(data)) {}
  static Relation build(const RelationType& type, std::vector<Value> cells, bool canonical);

  std::shared_ptr<const detail::RelationData> data_;
};

/// An atom or a relation.
class Value {
 public:
  Value(Atom a) : symbol_(a.symbol_) {}                  // NOLINT(google-explicit-constructor)
  Value(Relation r) : relation_(std::move(r)) {}         // NOLINT(google-explicit-constructor)

  bool is_atom() const { return symbol_ != nullptr; }
  Atom atom() const {
    if (!is_atom()) throw ModelError("value is a relation, not an atom");
    return Atom(symbol_);
  }
  const Relation& relation() const {
    if (is_atom()) throw ModelError("value is an atom, not a relation");
    return relation_;
  }
  std::uint64_t size_units() const { return is_atom() ? 1 : relation_.size_units(); }

 private:
  const std::string* symbol_ = nullptr;
  Relation relation_;
};

namespace detail {

struct RelationData {
  RelationType type;
  std::size_t arity = 0;
  std::vector<Value> cells;
  std::uint64_t size_units = 0;
  bool canonical = true;
};

}  // namespace detail

//---------------------------------------------------------------------------
// Total value order
//---------------------------------------------------------------------------

inline std::strong_ordering compare(const Value& a, const Value& b);

/// Componentwise, left to right.
inline std::strong_ordering compare_tuples(std::span<const Value> a, std::span<const Value> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto c = compare(a[i], b[i]);
    if (c != 0) return c;
  }
  return a.size() <=> b.size();
}

/// Lexicographic on the tuple lists (which are sorted for canonical relations).
inline std::strong_ordering compare(const Relation& a, const Relation& b) {
  if (a.identity() == b.identity()) return std::strong_ordering::equal;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto c = compare_tuples(a.tuple(i), b.tuple(i));
    if (c != 0) return c;
  }
  return a.size() <=> b.size();
}

inline std::strong_ordering compare(const Value& a, const Value& b) {
  if (a.is_atom()) return a.atom() <=> b.atom();
  return compare(a.relation(), b.relation());
}

inline bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
inline bool operator==(const Relation& a, const Relation& b) { return compare(a, b) == 0; }

struct TupleLess {
  bool operator()(std::span<const Value> a, std::span<const Value> b) const {
    return compare_tuples(a, b) < 0;
  }
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return compare_tuples(a, b) < 0;
  }
};

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return compare(a, b) < 0; }
};

//---------------------------------------------------------------------------
// Relation implementation
//---------------------------------------------------------------------------

namespace detail {

inline void check_component(const RelationType& expected, const Value& v) {
  if (expected.is_atom()) {
    if (!v.is_atom()) throw ModelError("expected an atom, found a relation");
    return;
  }
  if (v.is_atom()) throw ModelError("expected a relation of type " + to_string(expected) + ", found an atom");
  if (!(v.relation().type() == expected))
    throw ModelError("expected a relation of type " + to_string(expected) + ", found type " +
                     to_string(v.relation().type()));
}

inline std::vector<Value> flatten_checked(const RelationType& type,
                                          const std::vector<std::vector<Value>>& tuples) {
  if (type.is_atom()) throw ModelError("the atom type 0 has no relations");
  std::vector<Value> cells;
  cells.reserve(tuples.size() * type.arity());
  for (const auto& t : tuples) {
    if (t.size() != type.arity())
      throw ModelError("tuple of arity " + std::to_string(t.size()) + " in a relation of type " +
                       to_string(type));
    for (std::size_t i = 0; i < t.size(); ++i) {
      check_component(type[i], t[i]);
      cells.push_back(t[i]);
    }
  }
  return cells;
}

/// Sorts the rows of `cells` and removes duplicates.
inline std::vector<Value> sort_rows(std::size_t arity, std::vector<Value> cells) {
  const std::size_t rows = arity ? cells.size() / arity : 0;
  auto row = [&](std::size_t i) { return std::span<const Value>(cells.data() + i * arity, arity); };
  bool sorted = true;
  for (std::size_t i = 1; i < rows && sorted; ++i) sorted = compare_tuples(row(i - 1), row(i)) < 0;
  if (sorted) return cells;

  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return compare_tuples(row(a), row(b)) < 0; });
  std::vector<Value> out;
  out.reserve(cells.size());
  const Value* prev = nullptr;
  for (std::size_t idx : order) {
    std::span<const Value> r = row(idx);
    if (prev && compare_tuples(std::span<const Value>(prev, arity), r) == 0) continue;
    const std::size_t start = out.size();
    out.insert(out.end(), r.begin(), r.end());
    prev = out.data() + start;
  }
  return out;
}

}  // namespace detail

inline Relation::Relation(RelationType type) {
  if (type.is_atom()) throw ModelError("the atom type 0 has no relations");
  auto d = std::make_shared<detail::RelationData>();
  d->arity = type.arity();
  d->type = std::move(type);
  data_ = std::move(d);
}

inline const RelationType& Relation::type() const { return data_->type; }
inline std::size_t Relation::arity() const { return data_->arity; }
inline std::size_t Relation::size() const { return data_->cells.size() / data_->arity; }
inline std::span<const Value> Relation::tuple(std::size_t i) const {
  return {data_->cells.data() + i * data_->arity, data_->arity};
}
inline std::span<const Value> Relation::cells() const { return data_->cells; }
inline std::uint64_t Relation::size_units() const { return data_->size_units; }
inline bool Relation::is_canonical() const { return data_->canonical; }

inline bool Relation::contains(std::span<const Value> t) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto c = compare_tuples(tuple(mid), t);
    if (c == 0) return true;
    if (c < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return false;
}

inline Relation Relation::build(const RelationType& type, std::vector<Value> cells, bool canonical) {
  auto d = std::make_shared<detail::RelationData>();
  d->type = type;
  d->arity = type.arity();
  std::uint64_t units = cells.size();
  if (!type.is_flat()) {
    units = 0;
    for (const auto& v : cells) units += v.size_units();
  }
  d->size_units = units + cells.size() / d->arity;
  d->cells = std::move(cells);
  d->canonical = canonical;
  return Relation(std::shared_ptr<const detail::RelationData>(std::move(d)));
}

inline Value canonicalize(const Value& v);

inline Relation Relation::from_tuples(const RelationType& type,
                                      const std::vector<std::vector<Value>>& tuples) {
  std::vector<Value> cells = detail::flatten_checked(type, tuples);
  for (auto& c : cells)
    if (!c.is_atom()) c = canonicalize(c);
  return build(type, detail::sort_rows(type.arity(), std::move(cells)), true);
}

inline Relation Relation::raw(const RelationType& type, const std::vector<std::vector<Value>>& tuples) {
  return build(type, detail::flatten_checked(type, tuples), false);
}

inline Relation Relation::from_cells(const RelationType& type, std::vector<Value> cells) {
  return build(type, detail::sort_rows(type.arity(), std::move(cells)), true);
}

inline Relation Relation::from_sorted_cells(const RelationType& type, std::vector<Value> cells) {
  return build(type, std::move(cells), true);
}

/// The unique canonical representative of `v`: duplicates removed and rows
/// sorted at every nesting level. Idempotent.
inline Value canonicalize(const Value& v) {
  if (v.is_atom() || v.relation().is_canonical()) return v;
  const Relation& r = v.relation();
  std::vector<Value> cells(r.cells().begin(), r.cells().end());
  for (auto& c : cells)
    if (!c.is_atom()) c = canonicalize(c);
  return Relation::from_cells(r.type(), std::move(cells));
}

/// Deep set equality of two values of the same type.
inline bool deep_equal(const Value& a, const Value& b) {
  if (a.is_atom() != b.is_atom()) throw ModelError("deep_equal: an atom compared with a relation");
  if (a.is_atom()) return a.atom() == b.atom();
  if (!(a.relation().type() == b.relation().type()))
    throw ModelError("deep_equal: type mismatch " + to_string(a.relation().type()) + " vs " +
                     to_string(b.relation().type()));
  return compare(canonicalize(a), canonicalize(b)) == 0;
}

//---------------------------------------------------------------------------
// Databases
//---------------------------------------------------------------------------

using Schema = std::map<std::string, RelationType>;

/// The unary relation holding every atom of `domain` as a 1-tuple.
inline Relation domain_relation(std::span<const Atom> domain) {
  std::vector<Value> cells(domain.begin(), domain.end());
  return Relation::from_cells(flat_type(1), std::move(cells));
}

/// A non-empty finite domain plus named relations over it.
class Database {
 public:
  explicit Database(std::vector<Atom> domain, std::map<std::string, Relation> relations = {})
      : Database(std::move(domain), std::move(relations), true) {}

  /// Skips the domain checks; typecheck_database() reports what is wrong.
  static Database unvalidated(std::vector<Atom> domain, std::map<std::string, Relation> relations) {
    return Database(std::move(domain), std::move(relations), false);
  }

  /// Sorted, duplicate-free.
  const std::vector<Atom>& domain() const { return domain_; }
  const Relation& domain_relation() const { return *domain_relation_; }
  const std::map<std::string, Relation>& relations() const { return relations_; }

  const Relation* find(const std::string& name) const {
    auto it = relations_.find(name);
    return it == relations_.end() ? nullptr : &it->second;
  }

  Schema schema() const {
    Schema s;
    for (const auto& [name, rel] : relations_) s.emplace(name, rel.type());
    return s;
  }

  std::uint64_t size_units() const {
    std::uint64_t total = domain_.size();
    for (const auto& [name, rel] : relations_) total += rel.size_units();
    return total;
  }

  /// Copy with `name` set to `rel`.
  Database with_relation(const std::string& name, Relation rel) const {
    auto rels = relations_;
    rels.insert_or_assign(name, std::move(rel));
    return Database(domain_, std::move(rels));
  }

 private:
  Database(std::vector<Atom> domain, std::map<std::string, Relation> relations, bool validate)
      : relations_(std::move(relations)) {
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    if (validate && domain.empty()) throw ModelError("a database needs a non-empty domain");
    domain_ = std::move(domain);
    for (auto& [name, rel] : relations_) {
      if (!rel.is_canonical()) rel = canonicalize(rel).relation();
      if (validate) check_atoms(name, rel);
    }
    domain_relation_ = std::make_shared<const Relation>(eqalg::domain_relation(domain_));
  }

  void check_atoms(const std::string& name, const Relation& rel) const {
    for (const Value& v : rel.cells()) {
      if (v.is_atom()) {
        if (!std::binary_search(domain_.begin(), domain_.end(), v.atom()))
          throw ModelError("relation " + name + " mentions atom '" + v.atom().str() +
                           "' outside the domain");
      } else {
        check_atoms(name, v.relation());
      }
    }
  }

  std::vector<Atom> domain_;
  std::map<std::string, Relation> relations_;
  std::shared_ptr<const Relation> domain_relation_;
};

//---------------------------------------------------------------------------
// Counting and enumeration
//---------------------------------------------------------------------------

/// Counts with more than this many bits are refused rather than computed.
inline constexpr std::size_t kMaxCountBits = std::size_t{1} << 16;

/// Number of possible tuples of `type` over `n` atoms, or nullopt when the
/// number does not fit in kMaxCountBits bits.
inline std::optional<BigInt> tuple_universe_size(const RelationType& type, std::size_t n) {
  if (type.is_atom()) throw ModelError("the atom type 0 has no relations");
  BigInt total = 1;
  for (const auto& c : type.components()) {
    if (c.is_atom()) {
      total *= n;
    } else {
      auto inner = tuple_universe_size(c, n);
      if (!inner || *inner >= kMaxCountBits) return std::nullopt;
      total <<= static_cast<std::size_t>(*inner);  // times 2^inner
    }
    if (boost::multiprecision::msb(total | 1) >= kMaxCountBits) return std::nullopt;
  }
  return total;
}

/// 2^(number of possible tuples): how many relations of `type` exist over `n` atoms.
inline BigInt count_relations(const RelationType& type, std::size_t n) {
  if (n == 0) throw ModelError("count_relations needs a positive domain size");
  auto tuples = tuple_universe_size(type, n);
  if (!tuples || *tuples >= kMaxCountBits)
    throw ModelError("count of relations of type " + to_string(type) + " over " + std::to_string(n) +
                     " atoms is too large to represent");
  return BigInt(1) << static_cast<std::size_t>(*tuples);
}

/// Universes larger than this many tuples are never materialized.
inline constexpr std::size_t kMaxEnumerableUniverse = std::size_t{1} << 22;

namespace detail {

/// All possible tuples of `type` over `domain`, row-major, in canonical order.
inline std::vector<Value> tuple_universe(const RelationType& type, std::span<const Atom> domain);

inline std::vector<Value> all_relations_sorted(const RelationType& type, std::span<const Atom> domain);

}  // namespace detail

/// Lazy stream over every relation of a type: the possible tuples are kept
/// in canonical order and subsets are produced by a binary counter where
/// the lowest tuple is the lowest bit. The first relation is always the
/// empty one. Only the current candidate is materialized.
class RelationEnumerator {
 public:
  RelationEnumerator(RelationType type, std::span<const Atom> domain)
      : type_(std::move(type)), arity_(type_.arity()) {
    if (type_.is_atom()) throw ModelError("the atom type 0 has no relations");
    if (domain.empty()) throw ModelError("enumeration needs a non-empty domain");
    auto size = tuple_universe_size(type_, domain.size());
    if (!size || *size > kMaxEnumerableUniverse)
      throw ModelError("tuple universe of type " + to_string(type_) + " is too large to enumerate");
    universe_ = detail::tuple_universe(type_, domain);
    bits_.assign(universe_size(), false);
  }

  const RelationType& type() const { return type_; }
  std::size_t universe_size() const { return universe_.size() / arity_; }
  std::span<const Value> universe_tuple(std::size_t i) const {
    return {universe_.data() + i * arity_, arity_};
  }

  /// The next relation, or nullopt once every subset has been produced.
  std::optional<Relation> next() {
    if (done_) return std::nullopt;
    if (!started_) {
      started_ = true;
      return current();
    }
    std::size_t i = 0;
    while (i < bits_.size() && bits_[i]) bits_[i++] = false;
    if (i == bits_.size()) {
      done_ = true;
      return std::nullopt;
    }
    bits_[i] = true;
    return current();
  }

  void reset() {
    std::fill(bits_.begin(), bits_.end(), false);
    started_ = false;
    done_ = false;
  }

 private:
  Relation current() const {
    std::vector<Value> cells;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) {
        auto t = universe_tuple(i);
        cells.insert(cells.end(), t.begin(), t.end());
      }
    return Relation::from_sorted_cells(type_, std::move(cells));
  }

  RelationType type_;
  std::size_t arity_;
  std::vector<Value> universe_;
  std::vector<bool> bits_;
  bool started_ = false;
  bool done_ = false;
};

inline RelationEnumerator enumerate_relations(const RelationType& type, std::span<const Atom> domain) {
  return RelationEnumerator(type, domain);
}

namespace detail {

inline std::vector<Value> all_relations_sorted(const RelationType& type, std::span<const Atom> domain) {
  RelationEnumerator e(type, domain);
  std::vector<Value> all;
  while (auto r = e.next()) all.emplace_back(std::move(*r));
  std::sort(all.begin(), all.end(), ValueLess{});
  return all;
}

inline std::vector<Value> tuple_universe(const RelationType& type, std::span<const Atom> domain) {
  std::vector<std::vector<Value>> choices;
  for (const auto& c : type.components()) {
    if (c.is_atom())
      choices.emplace_back(domain.begin(), domain.end());
    else
      choices.push_back(all_relations_sorted(c, domain));
  }
  std::vector<Value> cells;
  std::vector<std::size_t> digit(choices.size(), 0);
  // Odometer with the last component fastest, which yields lexicographic order.
  while (true) {
    for (std::size_t i = 0; i < choices.size(); ++i) cells.push_back(choices[i][digit[i]]);
    std::size_t pos = choices.size();
    while (pos > 0) {
      --pos;
      if (++digit[pos] < choices[pos].size()) break;
      digit[pos] = 0;
      if (pos == 0) return cells;
    }
  }
}

}  // namespace detail

}  // namespace eqalg

#endif  // EQALG_MODEL_HPP
