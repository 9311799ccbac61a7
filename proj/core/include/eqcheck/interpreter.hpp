#pragma once

// Reference executor for programs at small sizes. Integers are unbounded,
// every element may be written once, and reads of unwritten non-input
// elements fault.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqcheck/frontend.hpp"
#include "eqcheck/program.hpp"
#include "eqcheck/relation.hpp"

namespace eqcheck {

using Element = std::vector<std::int64_t>;
using ArrayValues = std::map<Element, Int>;
using ArrayStore = std::map<std::string, ArrayValues>;

class RuntimeFault : public std::runtime_error {
 public:
  enum class Kind { DoubleWrite, UninitializedRead, OutOfBounds };
  RuntimeFault(Kind kind, std::string statement, std::vector<std::pair<std::string, std::int64_t>> iteration,
               std::string array, Element element);

  Kind kind;
  std::string statement;
  std::vector<std::pair<std::string, std::int64_t>> iteration;
  std::string array;
  Element element;
};

std::string to_string(RuntimeFault::Kind k);

/// Values of input arrays: explicit entries first, otherwise a deterministic
/// hash of (seed, array, element) in [lo, hi].
class InputSource {
 public:
  explicit InputSource(std::uint64_t seed = 0, std::int64_t lo = -1000, std::int64_t hi = 1000)
      : seed_(seed), lo_(lo), hi_(hi) {}

  void set(const std::string& array, const Element& e, Int v) { fixed_[array][e] = std::move(v); }
  /// Every element of `array` not set explicitly reads as `v`.
  void fill(const std::string& array, Int v) { fills_[array] = std::move(v); }
  Int value(const std::string& array, const Element& e) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::int64_t lo_, hi_;
  ArrayStore fixed_;
  std::map<std::string, Int> fills_;
};

/// One executed assignment, for dataflow tracing.
struct ExecEvent {
  std::string statement;
  std::map<std::string, std::int64_t> iteration;
  Element written;
  std::vector<std::pair<std::string, Element>> reads;  // left to right
};

struct ExecResult {
  ArrayStore outputs;                 // output arrays only
  ArrayStore inputs_read;             // input values actually consumed
  std::size_t steps = 0;              // executed assignments
};

struct RunOptions {
  std::function<void(const ExecEvent&)> on_assign;
};

/// Executes the program. Throws RuntimeFault.
ExecResult run(const Program& p, const InputSource& inputs, const RunOptions& opts = {});

/// Value of a right-hand side given operand values, using the interpreter's
/// fixed semantics for user functions.
Int apply_operator(const OperatorInfo& op, const std::vector<Int>& args);

struct DiffConfig {
  std::size_t trials = 100;
  std::vector<std::int64_t> n_values = {4, 8, 16};
  std::string size_constant = "N";
  std::uint64_t seed = 1;
};

struct Counterexample {
  std::int64_t n = 0;
  std::size_t trial = 0;
  std::uint64_t input_seed = 0;
  std::string output;
  Element element;
  std::optional<Int> value_a, value_b;  // nullopt: element not written
  std::string fault_a, fault_b;         // non-empty when a run faulted
  std::map<std::string, ArrayValues> inputs;  // inputs read by either side

  std::string to_string() const;
};

struct DiffResult {
  bool agree = true;
  std::size_t runs = 0;
  std::optional<Counterexample> first;
  /// Every differing output element of the run that produced `first`.
  std::vector<std::pair<std::string, Element>> differing;
};

/// Runs both programs on identical random inputs for every size override.
/// Throws FrontendError when a source does not parse under an override.
DiffResult differential_test(const std::string& source_a, const std::string& source_b, const DiffConfig& cfg,
                             const std::string& file_a = "a.c", const std::string& file_b = "b.c");

/// Same, on programs already parsed (no size overrides).
DiffResult differential_test(const Program& a, const Program& b, std::size_t trials, std::uint64_t seed);

}  // namespace eqcheck
