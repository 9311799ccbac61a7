#include "eqcheck/pipeline.hpp"

#include <cctype>
#include <chrono>
#include <sstream>

#include "eqcheck/frontend.hpp"
#include "json.hpp"

namespace eqcheck {

std::string tool_version() { return EQCHECK_VERSION; }

int exit_code(Status s) {
  switch (s) {
    case Status::Equivalent: return 0;
    case Status::Inequivalent: return 1;
    case Status::Unsupported: return 2;
  }
  return 2;
}

namespace {

using Clock = std::chrono::steady_clock;

class PhaseClock {
 public:
  explicit PhaseClock(Report& r) : r_(r) {}
  void done(const std::string& phase) {
    auto now = Clock::now();
    r_.timings.push_back({phase, std::chrono::duration<double, std::milli>(now - last_).count()});
    last_ = now;
  }

 private:
  Report& r_;
  Clock::time_point last_ = Clock::now();
};

void reject(Report& r, std::string phase, std::string program, std::string message) {
  r.status = Status::Unsupported;
  if (r.reason.empty()) r.reason = phase + ": " + (program.empty() ? "" : program + ": ") + message;
  r.errors.push_back({std::move(phase), std::move(program), std::move(message)});
}

void add_violations(Report& r, const std::string& phase, const std::string& file,
                    const std::vector<Violation>& vs) {
  for (const Violation& v : vs) reject(r, phase, file, v.message);
}

}  // namespace

Report verify(const std::string& source_a, const std::string& file_a, const std::string& source_b,
              const std::string& file_b, const CheckConfig& cfg) {
  Report r;
  r.file_a = file_a;
  r.file_b = file_b;
  r.config = cfg;
  r.config.observer = nullptr;
  auto start = Clock::now();
  PhaseClock clock(r);
  auto finish = [&] {
    r.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
  };

  std::optional<Program> pa, pb;
  auto parse = [&](const std::string& src, const std::string& file, std::optional<Program>& out) {
    try {
      out = parse_program(src, file);
    } catch (const FrontendError& e) {
      std::ostringstream msg;
      msg << e.loc().line << ":" << e.loc().col << ": " << e.message();
      reject(r, "parse", file, msg.str());
    }
  };
  parse(source_a, file_a, pa);
  parse(source_b, file_b, pb);
  clock.done("parse");
  if (!r.errors.empty()) return finish();

  add_violations(r, "class", file_a, check_single_assignment(*pa));
  add_violations(r, "class", file_b, check_single_assignment(*pb));
  add_violations(r, "class", file_a, check_bounds(*pa));
  add_violations(r, "class", file_b, check_bounds(*pb));
  clock.done("class");
  if (!r.errors.empty()) return finish();

  add_violations(r, "def-use", file_a, check_def_use_order(*pa));
  add_violations(r, "def-use", file_b, check_def_use_order(*pb));
  clock.done("def-use");
  if (!r.errors.empty()) return finish();

  std::optional<Addg> ga, gb;
  auto build = [&](const Program& p, const std::string& file, std::optional<Addg>& out) {
    try {
      out = Addg::build(p);
    } catch (const std::exception& e) {
      reject(r, "addg", file, e.what());
    }
  };
  build(*pa, file_a, ga);
  build(*pb, file_b, gb);
  clock.done("addg");
  if (!r.errors.empty()) return finish();

  for (auto [g, file] : {std::pair{&*ga, &file_a}, std::pair{&*gb, &file_b}}) {
    auto cycle = g->find_cycle();
    if (cycle.empty()) continue;
    std::string names;
    for (const auto& n : cycle) names += (names.empty() ? "" : ", ") + n;
    reject(r, "cycle", *file, "dependence cycle through " + names);
  }
  clock.done("cycle");
  if (!r.errors.empty()) return finish();

  try {
    r.result = check_equivalence(*ga, *gb, cfg);
    r.status = r.result->verdict.status;
    r.reason = r.result->verdict.reason;
  } catch (const ContractError& e) {
    reject(r, "check", "", e.what());
  } catch (const UnsupportedError& e) {
    reject(r, "check", "", e.what());
  }
  clock.done("check");
  return finish();
}

namespace {

using nlohmann::ordered_json;

const char* side_name(int side) { return side == 0 ? "original" : "transformed"; }

ordered_json suspect_json(const Suspect& s) {
  return {{"program", side_name(s.side)},
          {"statement", s.statement},
          {"array", s.array},
          {"occurrence", s.occurrence},
          {"text", s.text}};
}

template <class T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json diagnostic_json(const Diagnostic& d) {
  ordered_json j;
  j["kind"] = to_string(d.kind);
  j["output"] = d.output;
  j["message"] = d.message;
  j["path_a"] = d.path_a;
  j["path_b"] = d.path_b;
  j["statements_a"] = d.statements_a;
  j["statements_b"] = d.statements_b;
  j["suspects"] = ordered_json::array();
  for (const Suspect& s : d.suspects) j["suspects"].push_back(suspect_json(s));
  j["mapping_a"] = opt(d.mapping_a);
  j["mapping_b"] = opt(d.mapping_b);
  j["disagreement"] = opt(d.disagreement);
  if (d.hint) {
    ordered_json h = suspect_json(d.hint->at);
    h["suggestion"] = d.hint->suggestion.empty() ? ordered_json(nullptr) : ordered_json(d.hint->suggestion);
    h["note"] = d.hint->note;
    j["hint"] = h;
  } else {
    j["hint"] = nullptr;
  }
  return j;
}

std::string ms_text(double ms) {
  std::ostringstream s;
  s.precision(ms < 10 ? 2 : 1);
  s << std::fixed << ms << " ms";
  return s.str();
}

}  // namespace

std::string render_json(const Report& r, int indent) {
  ordered_json j;
  j["verdict"] = to_string(r.status);
  j["reason"] = r.reason.empty() ? ordered_json(nullptr) : ordered_json(r.reason);
  j["outputs"] = ordered_json::array();
  if (r.result) {
    for (const OutputReport& o : r.result->outputs) {
      ordered_json oj{{"name", o.name}, {"status", to_string(o.status)}, {"pieces", ordered_json::array()}};
      for (const PieceReport& p : o.pieces) {
        ordered_json pj{{"domain", p.domain}, {"status", to_string(p.status)}};
        pj["reason"] = p.reason.empty() ? ordered_json(nullptr) : ordered_json(p.reason);
        pj["diagnostics"] = ordered_json::array();
        for (const Diagnostic& d : p.diagnostics) pj["diagnostics"].push_back(diagnostic_json(d));
        oj["pieces"].push_back(pj);
      }
      j["outputs"].push_back(oj);
    }
    j["suppressed_diagnostics"] = r.result->suppressed_diagnostics;
    j["stats"] = {{"sub_traversals", r.result->stats.sub_traversals},
                  {"memo_hits", r.result->stats.memo_hits},
                  {"trials", r.result->stats.trials},
                  {"sync_points", r.result->stats.sync_points}};
  }
  j["errors"] = ordered_json::array();
  for (const PhaseError& e : r.errors)
    j["errors"].push_back({{"phase", e.phase}, {"program", e.program}, {"message", e.message}});
  ordered_json t = ordered_json::object();
  for (const PhaseTiming& p : r.timings) t[p.phase + "_ms"] = p.ms;
  t["total_ms"] = r.total_ms;
  j["timings"] = t;
  ordered_json corr = ordered_json::array();
  for (const auto& [a, b] : r.config.correspondences) corr.push_back({a, b});
  j["config"] = {{"original", r.file_a},
                 {"transformed", r.file_b},
                 {"focus", r.config.focus},
                 {"correspondences", corr},
                 {"budget", r.config.budget},
                 {"lookahead", r.config.lookahead},
                 {"memo", r.config.memo},
                 {"max_diagnostics", r.config.max_diagnostics}};
  j["tool_version"] = tool_version();
  return j.dump(indent);
}

std::string render_text(const Report& r) {
  std::ostringstream out;
  std::string verdict = to_string(r.status);
  verdict[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(verdict[0])));
  out << verdict;
  if (!r.reason.empty()) out << " (" << r.reason << ")";
  out << "\n";
  for (const PhaseError& e : r.errors) {
    out << "  " << e.phase << " error";
    if (!e.program.empty()) out << " in " << e.program;
    out << ": " << e.message << "\n";
  }
  if (r.result) {
    for (const OutputReport& o : r.result->outputs) {
      out << "output " << o.name << ": " << to_string(o.status) << "\n";
      for (const PieceReport& p : o.pieces) {
        out << "  piece " << p.domain << ": " << to_string(p.status);
        if (!p.reason.empty()) out << " (" << p.reason << ")";
        out << "\n";
        for (const Diagnostic& d : p.diagnostics) {
          out << "    " << to_string(d.kind) << ": " << d.message << "\n";
          if (!d.path_a.empty()) out << "      original:    " << d.path_a << "\n";
          if (!d.path_b.empty()) out << "      transformed: " << d.path_b << "\n";
          auto join = [](const std::vector<std::string>& v) {
            std::string s;
            for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
            return s.empty() ? std::string("-") : s;
          };
          if (!d.statements_a.empty() || !d.statements_b.empty())
            out << "      statements:  " << join(d.statements_a) << " | " << join(d.statements_b) << "\n";
          if (d.mapping_a) out << "      mapping a:   " << *d.mapping_a << "\n";
          if (d.mapping_b) out << "      mapping b:   " << *d.mapping_b << "\n";
          if (d.disagreement) out << "      differ on:   " << *d.disagreement << "\n";
          if (d.hint) {
            out << "      hint:        " << d.hint->at.text << " in " << d.hint->at.statement << " of the "
                << side_name(d.hint->at.side) << " program";
            if (!d.hint->suggestion.empty()) out << ", expected " << d.hint->suggestion;
            out << " (" << d.hint->note << ")\n";
          }
        }
      }
    }
    if (r.result->suppressed_diagnostics)
      out << r.result->suppressed_diagnostics << " further diagnostics suppressed\n";
  }
  out << "time:";
  for (const PhaseTiming& p : r.timings) out << " " << p.phase << " " << ms_text(p.ms) << ",";
  out << " total " << ms_text(r.total_ms) << "\n";
  return out.str();
}

}  // namespace eqcheck
