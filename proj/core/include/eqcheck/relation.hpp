#pragma once

// Exact integer tuple sets and relations.
//
// A relation is a finite union of conjuncts. Each conjunct constrains the
// concatenated tuple (input dims, output dims) plus a number of locally
// quantified existentials with affine equalities, affine inequalities and
// congruences. A relation whose output arity is zero is used as a set.
//
// All arithmetic is arbitrary precision. Decision procedures either answer
// exactly or throw UnsupportedError; they never guess.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace eqcheck {

using Int = mpz_class;

/// Thrown when an operation is handed operands of incompatible shape.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown when a decision procedure runs out of budget.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by IntRelation::parse on malformed text.
class RelationParseError : public std::runtime_error {
 public:
  RelationParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct Space {
  std::vector<std::string> names;

  Space() = default;
  explicit Space(std::vector<std::string> n) : names(std::move(n)) {}
  static Space anonymous(std::size_t arity);

  std::size_t arity() const { return names.size(); }
  bool operator==(const Space& o) const { return arity() == o.arity(); }
};

/// sum(coeffs[i] * var_i) + constant
struct LinearExpr {
  std::vector<Int> coeffs;
  Int constant = 0;

  LinearExpr() = default;
  explicit LinearExpr(std::size_t nvars) : coeffs(nvars, 0) {}
  static LinearExpr var(std::size_t nvars, std::size_t index, long coeff = 1);
  static LinearExpr constant_expr(std::size_t nvars, const Int& value);

  std::size_t size() const { return coeffs.size(); }
  bool is_constant() const;
  bool depends_on(std::size_t index) const { return coeffs[index] != 0; }

  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(const Int& k);
  LinearExpr operator-() const;
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(LinearExpr a, const Int& k) { return a *= k; }
  bool operator==(const LinearExpr&) const = default;
};

/// expr == 0 (mod modulus), modulus >= 2 once normalized.
struct Congruence {
  LinearExpr expr;
  Int modulus;
  bool operator==(const Congruence&) const = default;
};

/// One convex piece. Variables are laid out as [dims..., existentials...].
class Conjunct {
 public:
  Conjunct() = default;
  Conjunct(std::size_t dims, std::size_t exists) : num_dims_(dims), num_exists_(exists) {}

  std::size_t num_dims() const { return num_dims_; }
  std::size_t num_exists() const { return num_exists_; }
  std::size_t num_vars() const { return num_dims_ + num_exists_; }

  const std::vector<LinearExpr>& equalities() const { return eqs_; }
  const std::vector<LinearExpr>& inequalities() const { return ineqs_; }
  const std::vector<Congruence>& congruences() const { return congs_; }

  // Expressions must be sized num_vars().
  void add_equality(LinearExpr e);
  void add_inequality(LinearExpr e);
  void add_congruence(LinearExpr e, Int modulus);
  void add_constraints_from(const Conjunct& other);

  /// Appends a fresh existential column and returns its index.
  std::size_t add_existential();

  /// Evaluates the quantifier-free part on a full assignment of all vars.
  bool satisfied_by(const std::vector<Int>& values) const;

  bool operator==(const Conjunct&) const = default;

  // Mutable access for the solver and builders.
  std::vector<LinearExpr>& mutable_equalities() { return eqs_; }
  std::vector<LinearExpr>& mutable_inequalities() { return ineqs_; }
  std::vector<Congruence>& mutable_congruences() { return congs_; }
  void set_layout(std::size_t dims, std::size_t exists) {
    num_dims_ = dims;
    num_exists_ = exists;
  }

 private:
  std::size_t num_dims_ = 0;
  std::size_t num_exists_ = 0;
  std::vector<LinearExpr> eqs_;
  std::vector<LinearExpr> ineqs_;
  std::vector<Congruence> congs_;
};

class IntRelation {
 public:
  IntRelation() = default;
  /// The empty relation between the two spaces.
  IntRelation(Space in, Space out) : in_(std::move(in)), out_(std::move(out)) {}

  static IntRelation empty(Space in, Space out) { return IntRelation(std::move(in), std::move(out)); }
  static IntRelation universe(Space in, Space out);
  static IntRelation empty_set(Space s) { return IntRelation(std::move(s), Space{}); }
  static IntRelation universe_set(Space s) { return universe(std::move(s), Space{}); }
  /// {[x] -> [x] | x in set}
  static IntRelation identity_on(const IntRelation& set);
  /// Parses `{[x] -> [y] | constraints}` (optionally several joined by `union`).
  static IntRelation parse(std::string_view text);

  const Space& in_space() const { return in_; }
  const Space& out_space() const { return out_; }
  std::size_t in_arity() const { return in_.arity(); }
  std::size_t out_arity() const { return out_.arity(); }
  std::size_t num_dims() const { return in_arity() + out_arity(); }
  bool is_set() const { return out_.arity() == 0; }

  const std::vector<Conjunct>& conjuncts() const { return conjuncts_; }
  IntRelation& add_conjunct(Conjunct c);

  IntRelation with_names(Space in, Space out) const;

  /// Human-readable rendering; simplifies first. Parses back to an equal set.
  std::string to_string() const;
  /// Deterministic rendering of the current representation without
  /// semantic simplification. Equal strings imply equal sets; the converse
  /// does not hold.
  std::string canonical() const;

 private:
  Space in_;
  Space out_;
  std::vector<Conjunct> conjuncts_;
};

// --- algebra ----------------------------------------------------------------

/// {a -> c | exists b: (a -> b) in first and (b -> c) in second}
IntRelation compose(const IntRelation& first, const IntRelation& second);
IntRelation unite(const IntRelation& a, const IntRelation& b);
IntRelation intersect(const IntRelation& a, const IntRelation& b);
IntRelation difference(const IntRelation& a, const IntRelation& b);
IntRelation inverse(const IntRelation& r);
IntRelation domain(const IntRelation& r);
IntRelation range(const IntRelation& r);
IntRelation restrict_domain(const IntRelation& r, const IntRelation& set);
IntRelation restrict_range(const IntRelation& r, const IntRelation& set);
IntRelation apply_to_set(const IntRelation& r, const IntRelation& set);
/// Cartesian product of two sets as a relation {a -> b | a in x, b in y}.
IntRelation product(const IntRelation& x, const IntRelation& y);

bool is_empty(const IntRelation& r);
bool is_equal(const IntRelation& a, const IntRelation& b);
bool is_subset(const IntRelation& a, const IntRelation& b);

/// Some integer point of the relation (input dims then output dims).
std::optional<std::vector<Int>> sample(const IntRelation& r);

/// Removes existentials, empty and redundant pieces; same point set.
IntRelation simplify(const IntRelation& r);

/// If every output dim is an affine function of the input dims on every
/// piece, and all pieces agree, returns those functions (coefficients over
/// the input dims followed by a constant).
std::optional<std::vector<LinearExpr>> as_affine_function(const IntRelation& r);

// --- budget -----------------------------------------------------------------

/// Work units consumed by a decision procedure before it gives up. One unit
/// is one conjunct visited during elimination.
inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

/// Installs a per-thread budget for the lifetime of the guard.
class ScopedBudget {
 public:
  explicit ScopedBudget(std::uint64_t limit);
  ~ScopedBudget();
  ScopedBudget(const ScopedBudget&) = delete;
  ScopedBudget& operator=(const ScopedBudget&) = delete;

 private:
  std::uint64_t saved_limit_;
};

std::uint64_t current_budget();

}  // namespace eqcheck
