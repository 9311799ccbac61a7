#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eqcheck/program.hpp"

namespace eqcheck::detail {

enum class Tok { Ident, Number, Punct, Pragma, Hash, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

/// Splits source into tokens. Comments are dropped except `/*@ ... */`
/// pragmas; `#include` lines are skipped. Throws FrontendError on stray
/// characters or unterminated comments.
std::vector<Token> tokenize(std::string_view src, const std::string& file);

}  // namespace eqcheck::detail
