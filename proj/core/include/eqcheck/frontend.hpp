#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eqcheck/program.hpp"

namespace eqcheck {

class FrontendError : public std::runtime_error {
 public:
  enum class Kind { Syntax, NonAffine, DataDependent, Pointer, Semantic, Unsupported };

  FrontendError(Kind kind, std::string file, SourceLoc loc, std::string message);

  Kind kind() const { return kind_; }
  const std::string& file() const { return file_; }
  SourceLoc loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  Kind kind_;
  std::string file_;
  SourceLoc loc_;
  std::string message_;
};

using ConstantOverrides = std::map<std::string, std::int64_t>;

/// Parses one program. `overrides` replaces the value of matching #define
/// constants before any expression is evaluated.
Program parse_program(std::string_view source, const std::string& file = "<input>",
                      const ConstantOverrides& overrides = {});

Program parse_program_file(const std::string& path, const ConstantOverrides& overrides = {});

struct Violation {
  enum class Kind { DoubleWrite, UseBeforeDef, UninitializedRead, OutOfBounds };
  Kind kind;
  std::string array;
  std::vector<std::string> statements;
  /// Offending array element, when one could be sampled.
  std::vector<Int> element;
  std::string message;
};

std::string to_string(Violation::Kind k);

/// Every array element is written at most once.
std::vector<Violation> check_single_assignment(const Program& p);

/// Every read of a non-input element happens after the write that produces
/// it, and such a write exists.
std::vector<Violation> check_def_use_order(const Program& p);

/// Writes and reads stay inside declared extents (and are non-negative).
std::vector<Violation> check_bounds(const Program& p);

}  // namespace eqcheck
