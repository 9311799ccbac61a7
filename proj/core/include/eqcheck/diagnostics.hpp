#pragma once

// Failure reports localized to statements and index expressions.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eqcheck/addg.hpp"
#include "eqcheck/relation.hpp"

namespace eqcheck {

enum class DiagnosticKind { OperatorMismatch, LeafMismatch, MappingMismatch, UncoveredRead, InterfaceMismatch };
std::string to_string(DiagnosticKind k);

/// A traversal position: the root it started from and the edges taken.
struct PathTrace {
  std::size_t root = 0;
  std::vector<std::size_t> edges;
  std::size_t index = 0;  // 1-based root-to-leaf path number, 0 if not a full path
};

/// An array occurrence that feeds a mapping. Occurrence 0 is the
/// statement's left-hand side.
struct Suspect {
  int side = 0;  // 0 original, 1 transformed
  std::string statement;
  std::string array;
  int occurrence = 0;
  std::string text;
  auto operator<=>(const Suspect&) const = default;
};

struct Hint {
  Suspect at;
  std::string suggestion;  // e.g. buf[2*k]; empty if none could be derived
  std::string note;
};

struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::MappingMismatch;
  std::string output;
  std::string message;
  std::string piece;  // output-domain piece the diagnostic belongs to

  PathTrace trace_a, trace_b;
  std::string path_a, path_b;
  std::vector<std::string> statements_a, statements_b;
  std::vector<Suspect> suspects;
  std::optional<std::string> mapping_a, mapping_b;
  std::optional<std::string> disagreement;
  std::optional<Hint> hint;
};

/// "C -s3-> + -2-> buf[2*k] -s2-> + -1-> A[2*k - 2]"
std::string render_path(const Addg& g, const PathTrace& t);
/// Statement labels on the path, in order of first appearance.
std::vector<std::string> statements_on(const Addg& g, const PathTrace& t);
/// Left-hand sides and read occurrences on the path.
std::vector<Suspect> suspects_on(const Addg& g, const PathTrace& t, int side);

Diagnostic build_mapping_mismatch(const Addg& ga, const Addg& gb, const std::string& output, const PathTrace& a,
                                  const PathTrace& b, const IntRelation& map_a, const IntRelation& map_b);
Diagnostic build_leaf_mismatch(const Addg& ga, const Addg& gb, const std::string& output, const PathTrace& a,
                               const PathTrace& b, const IntRelation& map_a, const IntRelation& map_b);
Diagnostic build_operator_mismatch(const Addg& ga, const Addg& gb, const std::string& output, const PathTrace& a,
                                   const PathTrace& b, const IntRelation& dom, const std::string& detail);
Diagnostic build_uncovered_read(const Addg& g, int side, const std::string& output, const PathTrace& t,
                                const IntRelation& uncovered);
Diagnostic build_interface_mismatch(const std::string& output, const std::string& detail,
                                    std::optional<std::string> disagreement = std::nullopt);

/// A failed pairing group: mapping mismatches from one matching step plus
/// the leaf pairings of the same output piece that succeeded.
struct FailureGroup {
  std::vector<Diagnostic*> failing;
  std::vector<std::pair<PathTrace, PathTrace>> succeeding;
};

/// If exactly one array read lies on every failing path of one side and on
/// no succeeding path, attaches it as a hint to every failing
/// diagnostic, with a suggested index expression when one can be derived.
/// Needs at least two failures.
void common_variable_heuristic(const Addg& ga, const Addg& gb, FailureGroup& group,
                               const std::vector<std::pair<IntRelation, IntRelation>>& failing_maps);

/// The index expression that would make the path through `occurrence_edge`
/// produce `wanted` (output -> leaf element). Empty if not affine.
std::optional<std::string> suggest_index(const Addg& g, const PathTrace& t, std::size_t occurrence_edge,
                                         const IntRelation& wanted);

}  // namespace eqcheck
