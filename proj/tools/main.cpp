// eqcheck: equivalence checking of array-intensive loop programs.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "eqcheck/frontend.hpp"
#include "eqcheck/interpreter.hpp"
#include "eqcheck/pipeline.hpp"
#include "json.hpp"

namespace {

constexpr int kUsageError = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::pair<std::string, std::string> split_pair(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw CLI::ValidationError("--correspond", "expected name=name, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::string element_text(const eqcheck::Element& e) {
  std::string s;
  for (const auto& v : e) s += "[" + std::to_string(v) + "]";
  return s;
}

int run_oracle(const std::string& a, const std::string& b, const eqcheck::DiffConfig& cfg, bool json) {
  auto res = eqcheck::differential_test(slurp(a), slurp(b), cfg, a, b);
  if (json) {
    nlohmann::ordered_json j;
    j["agree"] = res.agree;
    j["runs"] = res.runs;
    if (res.first) {
      const auto& c = *res.first;
      j["counterexample"] = {{"n", c.n},
                             {"trial", c.trial},
                             {"input_seed", c.input_seed},
                             {"output", c.output},
                             {"element", element_text(c.element)},
                             {"value_a", c.value_a ? c.value_a->get_str() : ""},
                             {"value_b", c.value_b ? c.value_b->get_str() : ""},
                             {"fault_a", c.fault_a},
                             {"fault_b", c.fault_b}};
      j["differing"] = nlohmann::ordered_json::array();
      for (const auto& [name, e] : res.differing) j["differing"].push_back(name + element_text(e));
    }
    j["tool_version"] = eqcheck::tool_version();
    std::cout << j.dump(2) << "\n";
  } else if (res.agree) {
    std::cout << "agree (" << res.runs << " runs)\n";
  } else {
    std::cout << "counterexample\n" << res.first->to_string() << "\n";
    if (!res.differing.empty()) {
      std::cout << "differing elements:";
      for (const auto& [name, e] : res.differing) std::cout << " " << name << element_text(e);
      std::cout << "\n";
    }
  }
  return res.agree ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivalence checker for array-intensive loop programs"};
  app.set_version_flag("--version", eqcheck::tool_version());
  app.require_subcommand(1);

  std::string file_a, file_b;
  bool json = false;

  auto* check = app.add_subcommand("check", "Prove two programs equivalent or report where they differ");
  check->add_option("original", file_a)->required();
  check->add_option("transformed", file_b)->required();
  check->add_flag("--json", json, "Structured report");
  std::vector<std::string> focus, correspond;
  eqcheck::CheckConfig cfg;
  check->add_option("--focus", focus, "Only check these outputs")->delimiter(',');
  check->add_option("--correspond", correspond, "Intermediate arrays that hold the same values (a=b)");
  check->add_option("--budget", cfg.budget, "Solver work budget per relation operation")
      ->check(CLI::Range(std::uint64_t{1000}, std::uint64_t{1} << 62));
  check->add_option("--lookahead", cfg.lookahead, "Depth of trial matches for commutative operands")
      ->check(CLI::NonNegativeNumber);
  check->add_option("--max-diagnostics", cfg.max_diagnostics);
  bool no_memo = false;
  check->add_flag("--no-memo", no_memo, "Disable tabling of proven sub-results");

  auto* oracle = app.add_subcommand("oracle", "Run both programs on random inputs and compare outputs");
  oracle->add_option("original", file_a)->required();
  oracle->add_option("transformed", file_b)->required();
  eqcheck::DiffConfig dcfg;
  std::vector<std::int64_t> ns;
  oracle->add_option("--n", ns, "Size values substituted for the size constant")->delimiter(',');
  oracle->add_option("--size-constant", dcfg.size_constant);
  oracle->add_option("--trials", dcfg.trials)->check(CLI::PositiveNumber);
  oracle->add_option("--seed", dcfg.seed);
  oracle->add_flag("--json", json);

  auto* addg = app.add_subcommand("addg", "Print the array data dependence graph in DOT");
  addg->add_option("program", file_a)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*check) {
      cfg.focus = focus;
      for (const auto& c : correspond) cfg.correspondences.push_back(split_pair(c));
      cfg.memo = !no_memo;
      auto report = eqcheck::verify(slurp(file_a), file_a, slurp(file_b), file_b, cfg);
      std::cout << (json ? eqcheck::render_json(report) + "\n" : eqcheck::render_text(report));
      return eqcheck::exit_code(report.status);
    }
    if (*oracle) {
      if (!ns.empty()) dcfg.n_values = ns;
      return run_oracle(file_a, file_b, dcfg, json);
    }
    if (*addg) {
      auto g = eqcheck::Addg::build(eqcheck::parse_program(slurp(file_a), file_a));
      std::cout << g.to_dot();
      return 0;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const eqcheck::FrontendError& e) {
    std::cerr << "parse error: " << e.file() << ":" << e.loc().line << ":" << e.loc().col << ": " << e.message()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return kUsageError;
}
