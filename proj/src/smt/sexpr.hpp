#pragma once

// Minimal S-expression reader for solver replies and scripts.

#include <cstddef>
#include <string>
#include <vector>

namespace flg::sexpr {

struct Node {
  enum class Kind { Atom, String, List } kind = Kind::Atom;
  std::string text;  // Atom: symbol/numeral (|..| quotes stripped); String: decoded payload
  std::vector<Node> items;

  bool is_atom(const char* s) const { return kind == Kind::Atom && text == s; }
  bool is_list() const { return kind == Kind::List; }
};

// Length of the first complete S-expression in `s` starting at `pos`
// (leading whitespace included), or npos when the input is incomplete.
std::size_t complete_prefix(const std::string& s, std::size_t pos = 0);

// Parses every top-level expression. Throws std::runtime_error on bad input.
std::vector<Node> parse_all(const std::string& s);

// Decodes an SMT-LIB string literal body ("" doubling, \u{..} escapes) to UTF-8.
std::string decode_string(const std::string& raw);

std::string to_text(const Node& n);

}  // namespace flg::sexpr
