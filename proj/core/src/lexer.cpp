#include "lexer.hpp"

#include <array>
#include <cctype>

#include "eqcheck/frontend.hpp"

namespace eqcheck::detail {

namespace {

constexpr std::array<std::string_view, 14> kTwoChar = {
    "<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-=", "*=", "->", "<<", ">>"};

constexpr std::string_view kSingle = "+-*/%<>=!&|()[]{};:,?~^.";

}  // namespace

std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto error = [&](SourceLoc at, const std::string& msg) {
    throw FrontendError(FrontendError::Kind::Syntax, file, at, msg);
  };

  while (i < src.size()) {
    char c = src[i];
    SourceLoc here{line, col};
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) error(here, "unterminated comment");
      bool pragma = i + 2 < src.size() && src[i + 2] == '@';
      std::string body(src.substr(i + 2, end - i - 2));
      advance(end + 2 - i);
      if (pragma) out.push_back({Tok::Pragma, body.substr(1), here});
      continue;
    }
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < src.size() && (src[j] == ' ' || src[j] == '\t')) ++j;
      if (src.substr(j, 7) == "include") {
        while (i < src.size() && src[i] != '\n') advance(1);
        continue;
      }
      out.push_back({Tok::Hash, "#", here});
      advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), here});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '.'))
        error(here, "unsupported numeric literal");
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), here});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (auto two : kTwoChar) {
      if (src.substr(i, 2) == two) {
        out.push_back({Tok::Punct, std::string(two), here});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSingle.find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), here});
      advance(1);
      continue;
    }
    error(here, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

}  // namespace eqcheck::detail
