#pragma once

// End-to-end verification of two program files and report rendering.

#include <optional>
#include <string>
#include <vector>

#include "eqcheck/checker.hpp"

namespace eqcheck {

std::string tool_version();

struct PhaseTiming {
  std::string phase;
  double ms = 0;
};

/// A phase that rejected the input before checking could finish.
struct PhaseError {
  std::string phase;  // parse, class, def-use, addg, cycle, check
  std::string program;  // file name, empty when it concerns both
  std::string message;
};

struct Report {
  Status status = Status::Equivalent;
  std::string reason;
  std::string file_a, file_b;
  CheckConfig config;
  std::optional<CheckResult> result;
  std::vector<PhaseError> errors;
  std::vector<PhaseTiming> timings;
  double total_ms = 0;
};

/// parse -> class checks -> def-use -> ADDG -> cycles -> check. Input
/// errors never throw; they end up in `errors` with status Unsupported.
Report verify(const std::string& source_a, const std::string& file_a, const std::string& source_b,
              const std::string& file_b, const CheckConfig& cfg = {});

/// 0 equivalent, 1 inequivalent, 2 unsupported or rejected input.
int exit_code(Status s);

std::string render_text(const Report& r);
std::string render_json(const Report& r, int indent = 2);

}  // namespace eqcheck
