#pragma once

// Equivalence checking by synchronized traversal of two ADDGs, with
// flattening of associative chains, matching of commutative operands and
// tabling of proven sub-results.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "eqcheck/addg.hpp"
#include "eqcheck/diagnostics.hpp"
#include "eqcheck/relation.hpp"

namespace eqcheck {

enum class Status { Equivalent, Inequivalent, Unsupported };
std::string to_string(Status s);
/// Inequivalent dominates Unsupported, which dominates Equivalent.
Status combine(Status a, Status b);

struct Verdict {
  Status status = Status::Equivalent;
  std::string reason;  // Unsupported only
};

/// One side of a synchronization point.
struct SyncSide {
  std::size_t node;
  const IntRelation* map;            // output -> current node element
  const std::vector<std::string>* trace;  // operators passed, chains collapsed
};

struct CheckConfig {
  std::vector<std::string> focus;  // empty: every output
  std::vector<std::pair<std::string, std::string>> correspondences;
  std::uint64_t budget = kDefaultBudget;
  int lookahead = 8;
  bool memo = true;
  std::size_t max_diagnostics = 20;
  /// Called at every synchronization point with both sides.
  std::function<void(const SyncSide&, const SyncSide&)> observer;
};

struct PieceReport {
  std::string domain;
  IntRelation domain_set;
  Status status = Status::Equivalent;
  std::string reason;
  std::vector<Diagnostic> diagnostics;
};

struct OutputReport {
  std::string name;
  Status status = Status::Equivalent;
  std::vector<PieceReport> pieces;
};

/// A leaf reached on both sides.
struct LeafPairing {
  std::string output;
  PathTrace a, b;
  std::string leaf_a, leaf_b;
  IntRelation domain;
  IntRelation map_a, map_b;
  bool ok = false;
};

/// One matching step over a commutative operator.
struct MatchRecord {
  std::string output;
  std::string op_a, op_b;
  IntRelation domain;
  std::vector<std::string> entries_a, entries_b;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> ok;
};

struct CheckStats {
  std::size_t sub_traversals = 0;  // operator pairs explored
  std::size_t memo_hits = 0;
  std::size_t trials = 0;          // lookahead sub-checks
  std::size_t sync_points = 0;
};

struct CheckResult {
  Verdict verdict;
  std::vector<OutputReport> outputs;
  std::vector<Diagnostic> diagnostics;  // flattened, at most max_diagnostics
  std::size_t suppressed_diagnostics = 0;
  std::vector<LeafPairing> leaves;
  std::vector<MatchRecord> matches;
  CheckStats stats;
};

CheckResult check_equivalence(const Addg& a, const Addg& b, const CheckConfig& cfg = {});

/// Flattened operands of an associative chain rooted at `op_node`, reached
/// with output-current mapping `prefix`. One list per output-domain piece.
struct FlatEntry {
  std::size_t node;
  IntRelation mapping;  // output -> entry node element
  std::size_t order_index;
  PathTrace trace;
};
struct FlatPiece {
  IntRelation domain;
  std::vector<FlatEntry> entries;
};
std::vector<FlatPiece> flatten(const Addg& g, std::size_t op_node, const IntRelation& prefix);

}  // namespace eqcheck
