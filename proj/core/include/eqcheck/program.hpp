#pragma once

// AST of the single-assignment loop language: one C-like function over
// integer arrays with affine loop nests, affine guards and labeled array
// assignments.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqcheck/relation.hpp"

namespace eqcheck {

struct SourceLoc {
  int line = 0;
  int col = 0;
  // Locations never participate in AST equality.
  bool operator==(const SourceLoc&) const { return true; }
};

/// Affine form over loop iterator names with an integer constant.
struct AffineExpr {
  std::map<std::string, std::int64_t> terms;
  std::int64_t constant = 0;

  static AffineExpr of_constant(std::int64_t c);
  static AffineExpr of_var(const std::string& name, std::int64_t coeff = 1);

  std::int64_t coeff(const std::string& name) const;
  bool is_constant() const;
  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(std::int64_t k);
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }

  /// Lowers to a LinearExpr over `vars` (in order); throws ContractError if a
  /// term names a variable not in the list.
  LinearExpr lower(const std::vector<std::string>& vars) const;
  std::int64_t evaluate(const std::map<std::string, std::int64_t>& env) const;
  std::string to_string() const;

  bool operator==(const AffineExpr& o) const;
};

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

/// Boolean formula over affine comparisons of loop iterators.
struct Condition {
  enum class Kind { Compare, Divisible, And, Or, Not };
  Kind kind = Kind::Compare;
  CmpOp op = CmpOp::Eq;
  AffineExpr lhs;
  AffineExpr rhs;
  std::int64_t modulus = 0;  // Divisible: lhs % modulus == 0
  std::vector<Condition> children;

  bool evaluate(const std::map<std::string, std::int64_t>& env) const;
  /// The set of iterator tuples (over `vars`) satisfying the formula.
  IntRelation to_set(const std::vector<std::string>& vars) const;
  std::string to_string() const;
  bool operator==(const Condition&) const = default;
};

struct ArrayRef {
  std::string array;
  std::vector<AffineExpr> indices;
  SourceLoc loc;

  std::string to_string() const;
  bool operator==(const ArrayRef&) const = default;
};

/// Value expression: operator applications over array reads and constants.
struct Expr {
  enum class Kind { Read, Constant, Apply };
  Kind kind = Kind::Constant;
  ArrayRef ref;               // Read
  std::int64_t value = 0;     // Constant
  std::string op;             // Apply: "+", "-", "*", "neg" or a user function
  std::vector<Expr> args;     // Apply
  SourceLoc loc;

  static Expr read(ArrayRef r);
  static Expr constant(std::int64_t v);
  static Expr apply(std::string op, std::vector<Expr> args);

  std::string to_string() const;
  bool operator==(const Expr&) const = default;
};

struct Assignment {
  std::string label;
  ArrayRef lhs;
  Expr rhs;
  SourceLoc loc;
  bool operator==(const Assignment&) const = default;
};

struct Stmt {
  enum class Kind { Assign, For, If };
  Kind kind = Kind::Assign;
  SourceLoc loc;

  Assignment assign;           // Assign

  std::string iterator;        // For
  AffineExpr init;
  Condition cond;
  std::int64_t step = 1;

  Condition guard;             // If

  std::vector<Stmt> body;      // For body, If then-branch
  std::vector<Stmt> else_body; // If else-branch

  bool operator==(const Stmt&) const = default;
};

enum class ArrayRole { Input, Output, Local };

struct ArrayDecl {
  std::string name;
  /// Extent per dimension; nullopt for an unsized parameter dimension.
  std::vector<std::optional<std::int64_t>> extents;
  ArrayRole role = ArrayRole::Local;
  bool is_param = false;
  bool is_const = false;
  bool operator==(const ArrayDecl&) const = default;
};

struct OperatorInfo {
  std::string symbol;
  int arity = 2;
  bool associative = false;
  bool commutative = false;
  bool builtin = false;
  bool operator==(const OperatorInfo&) const = default;
};

class OperatorTable {
 public:
  /// Table holding the built-ins: + and * (associative, commutative),
  /// binary - and unary neg (neither).
  static OperatorTable with_builtins();

  const OperatorInfo* find(const std::string& symbol) const;
  void declare(OperatorInfo info);
  const std::map<std::string, OperatorInfo>& all() const { return ops_; }
  bool operator==(const OperatorTable&) const = default;

 private:
  std::map<std::string, OperatorInfo> ops_;
};

struct Program {
  std::string name;
  std::string file;
  std::map<std::string, std::int64_t> constants;
  /// Parameters in signature order, then locals in declaration order.
  std::vector<ArrayDecl> arrays;
  std::vector<std::string> scalars;
  OperatorTable operators = OperatorTable::with_builtins();
  std::vector<Stmt> body;

  const ArrayDecl* find_array(const std::string& name) const;
  std::vector<std::string> inputs() const;
  std::vector<std::string> outputs() const;

  /// Renders the program back to source; parsing the result yields an equal
  /// AST.
  std::string to_source() const;

  bool operator==(const Program& o) const {
    return name == o.name && arrays == o.arrays && operators == o.operators && body == o.body;
  }
};

/// A statement together with its enclosing loop context.
struct StatementInfo {
  const Assignment* assign = nullptr;
  std::string label;
  std::size_t index = 0;                 // textual order
  std::vector<std::string> iterators;    // outermost first
  std::vector<const Stmt*> loops;        // the enclosing For nodes
  std::vector<int> directions;           // +1 / -1 per loop
  /// Textual position at each nesting level; size iterators.size() + 1.
  std::vector<int> positions;
  /// Iteration domain: loop bounds, strides and guards.
  IntRelation domain;

  /// {[iterators] -> [element]} for the given reference of this statement.
  IntRelation access(const ArrayRef& ref) const;
  IntRelation write_access() const { return access(assign->lhs); }
  /// Elements written by the statement.
  IntRelation write_set() const { return range(write_access()); }
};

std::vector<StatementInfo> collect_statements(const Program& p);

/// Array reads of an expression, left to right.
std::vector<const ArrayRef*> reads_of(const Expr& e);

}  // namespace eqcheck
