#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eqtest {

std::string fixture_path(const std::string& name) { return std::string(EQCHECK_FIXTURE_DIR) + "/" + name; }

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

eqcheck::Program load_fixture(const std::string& name, const eqcheck::ConstantOverrides& overrides) {
  return eqcheck::parse_program(read_fixture(name), name, overrides);
}

}  // namespace eqtest
