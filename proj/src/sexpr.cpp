#include "loopsynth/sexpr.hpp"

#include <cctype>

#include "loopsynth/errors.hpp"

namespace loopsynth {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(expr());
      skip();
    }
    return out;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, pos_ - line_start_ + 1);
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr expr() {
    const char c = text_[pos_];
    if (c == ')') fail("unexpected ')'");
    if (c == '(') {
      advance();
      SExpr list;
      list.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) fail("unterminated list");
        if (text_[pos_] == ')') {
          advance();
          return list;
        }
        list.items.push_back(expr());
      }
    }
    SExpr a;
    if (c == '"') {
      a.atom += '"';
      advance();
      for (;;) {
        if (pos_ >= text_.size()) fail("unterminated string literal");
        const char d = text_[pos_];
        advance();
        a.atom += d;
        if (d == '"') {
          // "" is an escaped quote inside a string literal.
          if (pos_ < text_.size() && text_[pos_] == '"') {
            a.atom += '"';
            advance();
            continue;
          }
          return a;
        }
      }
    }
    if (c == '|') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '|') {
        a.atom += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size()) fail("unterminated quoted symbol");
      advance();
      return a;
    }
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';' || d == '"') break;
      a.atom += d;
      advance();
    }
    return a;
  }
};

}  // namespace

std::string SExpr::to_string() const {
  if (!is_list) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].to_string();
  }
  return out + ")";
}

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).all(); }

}  // namespace loopsynth
