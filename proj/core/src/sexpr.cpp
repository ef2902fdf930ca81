#include "sexpr.hpp"

#include <cctype>

#include "counterplan/errors.hpp"

namespace counterplan::detail {

namespace {

class Reader {
 public:
  Reader(std::string_view text, std::size_t line, std::size_t column)
      : text_(text), line_(line), column_(column) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read_one());
      skip_space();
    }
    return out;
  }

 private:
  SExpr read_one() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, column_);
    SExpr e;
    e.line = line_;
    e.column = column_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, column_);
    if (c == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced '(' opened here", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read_one());
      }
      return e;
    }
    while (pos_ < text_.size()) {
      c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
      e.token.push_back(c);
      advance();
    }
    return e;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text, std::size_t first_line,
                               std::size_t first_column) {
  return Reader(text, first_line, first_column).read_all();
}

SExpr read_sexpr(std::string_view text, std::size_t first_line, std::size_t first_column) {
  auto all = read_sexprs(text, first_line, first_column);
  if (all.empty()) throw ParseError("expected an expression", first_line, first_column);
  if (all.size() > 1)
    throw ParseError("unexpected trailing input after expression", all[1].line, all[1].column);
  return std::move(all.front());
}

int paren_balance(std::string_view text) {
  int depth = 0;
  bool comment = false;
  for (char c : text) {
    if (comment) {
      if (c == '\n') comment = false;
      continue;
    }
    if (c == ';') comment = true;
    else if (c == '(') ++depth;
    else if (c == ')') --depth;
  }
  return depth;
}

std::string to_string(const SExpr& e) {
  if (!e.is_list) return e.token;
  std::string out = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    out += to_string(e.items[i]);
  }
  return out + ")";
}

}  // namespace counterplan::detail
