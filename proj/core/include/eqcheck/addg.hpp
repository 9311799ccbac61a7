#pragma once

// Array data dependence graph: array variables and operator occurrences,
// with edges pointing against the flow of data. Every edge carries a
// dependency mapping from elements of the defining statement's left-hand side
// to elements of the target node.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eqcheck/program.hpp"
#include "eqcheck/relation.hpp"

namespace eqcheck {

enum class ArrayClass { Input, Output, Intermediate };

struct AddgNode {
  enum class Kind { Array, Operator, Constant };
  Kind kind = Kind::Array;
  std::string name;                 // array name or operator symbol
  ArrayClass array_class = ArrayClass::Intermediate;
  std::string statement;            // owning statement (Operator, Constant)
  std::vector<int> position;        // operand path inside the right-hand side
  std::int64_t value = 0;           // Constant
  int arity = 0;
  bool associative = false;
  bool commutative = false;

  bool is_array() const { return kind == Kind::Array; }
  bool is_operator() const { return kind == Kind::Operator; }
  std::string describe() const;
};

struct AddgEdge {
  enum class Kind { Definition, Operand };
  Kind kind = Kind::Definition;
  std::size_t from = 0;
  std::size_t to = 0;
  std::string statement;     // statement whose right-hand side this edge belongs to
  int position = 0;          // Operand: 1-based operand position
  int occurrence = 0;        // reads: 1-based occurrence of the array in the statement
  std::string ref_text;      // reads: the reference as written, e.g. buf[2*k]
  IntRelation mapping;       // lhs element -> target element

  std::string label() const;
};

/// Per-statement facts the checker and diagnostics need.
struct StatementRecord {
  std::string label;
  std::string array;
  std::vector<std::string> iterators;
  IntRelation domain;
  IntRelation write_access;  // iteration -> element
  IntRelation write_set;
  std::string lhs_text;
  std::string rhs_text;
  int line = 0;
};

/// Output of demand_split: one piece per defining statement that supplies
/// part of the demand.
struct DemandPiece {
  std::size_t edge;          // the definition edge
  IntRelation demanded;      // the demand restricted to the statement's writes
};

struct DemandSplit {
  std::vector<DemandPiece> pieces;
  IntRelation uncovered;     // demanded elements no statement defines
};

class Addg {
 public:
  static Addg build(const Program& p);

  const std::vector<AddgNode>& nodes() const { return nodes_; }
  const std::vector<AddgEdge>& edges() const { return edges_; }
  const AddgNode& node(std::size_t i) const { return nodes_[i]; }
  const AddgEdge& edge(std::size_t i) const { return edges_[i]; }
  /// Outgoing edges: definitions in statement order, operands by position.
  const std::vector<std::size_t>& out_edges(std::size_t n) const { return out_[n]; }

  std::optional<std::size_t> find_array(const std::string& name) const;
  std::vector<std::size_t> roots() const;
  std::vector<std::size_t> leaves() const;
  const StatementRecord& statement(const std::string& label) const;
  const std::vector<StatementRecord>& statements() const { return stmts_; }
  const std::string& name() const { return name_; }

  /// Union of the write sets of every statement defining the array.
  IntRelation defined_elements(std::size_t array_node) const;

  /// Partitions `demanded` (output -> array element) by defining statement.
  DemandSplit demand_split(std::size_t array_node, const IntRelation& demanded) const;

  /// compose(prefix, edge.mapping): the output-current mapping after
  /// crossing the edge.
  IntRelation reduce(const IntRelation& prefix, std::size_t edge) const;

  /// Array names forming a dependence cycle, empty if the graph is acyclic.
  std::vector<std::string> find_cycle() const;

  /// Number of root-to-leaf paths starting at `from` (saturates at max).
  std::size_t count_paths(std::size_t from, std::size_t max = 1'000'000) const;
  /// All root-to-leaf paths from `from` as edge sequences, numbered left to
  /// right. Empty if there are more than `max`.
  std::vector<std::vector<std::size_t>> paths(std::size_t from, std::size_t max = 100'000) const;

  std::string to_dot() const;

 private:
  std::size_t add_node(AddgNode n);
  std::size_t add_edge(AddgEdge e);

  std::string name_;
  std::vector<AddgNode> nodes_;
  std::vector<AddgEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<StatementRecord> stmts_;
};

}  // namespace eqcheck
