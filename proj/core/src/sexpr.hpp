#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace counterplan::detail {

struct SExpr {
  bool is_list = false;
  std::string token;          // valid when !is_list
  std::vector<SExpr> items;   // valid when is_list
  std::size_t line = 0;
  std::size_t column = 0;

  bool is_token(std::string_view t) const { return !is_list && token == t; }
};

// Reads every top-level expression in `text`. `first_line` and `first_column`
// offset reported positions when `text` is a slice of a larger document.
// Throws ParseError on unbalanced parentheses.
std::vector<SExpr> read_sexprs(std::string_view text, std::size_t first_line = 1,
                               std::size_t first_column = 1);

// Exactly one expression; throws ParseError otherwise.
SExpr read_sexpr(std::string_view text, std::size_t first_line = 1, std::size_t first_column = 1);

// Net parenthesis depth of `text` (ignores ';' comments).
int paren_balance(std::string_view text);

std::string to_string(const SExpr& e);

}  // namespace counterplan::detail
