#pragma once

#include <string>

#include "eqcheck/frontend.hpp"

namespace eqtest {

std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);
eqcheck::Program load_fixture(const std::string& name, const eqcheck::ConstantOverrides& overrides = {});

}  // namespace eqtest
