#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace loopsynth {

/// Minimal SMT-LIB2 s-expression: either an atom or a list.
/// String literals keep their quotes; |quoted| symbols are unquoted.
struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool is_list = false;

  bool is_atom() const noexcept { return !is_list; }
  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  std::string to_string() const;
  bool operator==(const SExpr&) const = default;
};

/// Parses a sequence of top-level s-expressions. `;` starts a line comment.
/// Throws ParseError on unbalanced parentheses or unterminated literals.
std::vector<SExpr> parse_sexprs(std::string_view text);

}  // namespace loopsynth
