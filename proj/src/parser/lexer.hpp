#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flg/diagnostics.hpp"

namespace flg::detail {

enum class Tok : std::uint8_t {
  End,
  Ident,      // includes keywords; text holds the spelling
  TypeParam,  // 'a
  Int,
  String,
  HashIdent,  // #name
  HashBrace,  // #{
  HashEq,     // #=
  HashIf,     // #if
  Backquote,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Comma, Semi, Dot, Colon, ColonDash, ColonColon,
  Eq, NotEq, Query, Underscore, Bar, FatArrow, Arrow,
  Plus, Minus, Star, Slash, Percent,
  Lt, Le, Gt, Ge, AndAnd, OrOr, Bang, Tilde, Caret,
  Wedge, Vee, Implies, Iff,
};

const char* tok_spelling(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t ival = 0;
  int width = 32;
  int line = 1;
  int col = 1;
};

// Throws DiagnosticError on malformed input.
std::vector<Token> lex(std::string_view src, Symbol file, int first_line = 1);

}  // namespace flg::detail
