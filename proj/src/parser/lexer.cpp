#include "lexer.hpp"

#include <cctype>

namespace flg::detail {

const char* tok_spelling(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::TypeParam: return "type parameter";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::HashIdent: return "'#name'";
    case Tok::HashBrace: return "'#{'";
    case Tok::HashEq: return "'#='";
    case Tok::HashIf: return "'#if'";
    case Tok::Backquote: return "'`'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::ColonDash: return "':-'";
    case Tok::ColonColon: return "'::'";
    case Tok::Eq: return "'='";
    case Tok::NotEq: return "'!='";
    case Tok::Query: return "'?" "?'";
    case Tok::Underscore: return "'_'";
    case Tok::Bar: return "'|'";
    case Tok::FatArrow: return "'=>'";
    case Tok::Arrow: return "'->'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::Tilde: return "'~'";
    case Tok::Caret: return "'^'";
    case Tok::Wedge: return "'/\\'";
    case Tok::Vee: return "'\\/'";
    case Tok::Implies: return "'==>'";
    case Tok::Iff: return "'<==>'";
  }
  return "?";
}

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  Lexer(std::string_view src, Symbol file, int line)
      : src_(src), file_(file), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      scan(t);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int line, int col) {
    throw DiagnosticError({Severity::Error, {file_, line, col}, "syntax", msg});
  }

  char peek(std::size_t k = 0) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
  }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }
  bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek())))
        advance();
      if (starts("(*")) {
        int line = line_, col = col_;
        int depth = 0;
        do {
          if (pos_ >= src_.size()) fail("unterminated comment", line, col);
          if (starts("(*")) {
            ++depth;
            advance(2);
          } else if (starts("*)")) {
            --depth;
            advance(2);
          } else {
            advance();
          }
        } while (depth > 0);
        continue;
      }
      return;
    }
  }

  void scan(Token& t) {
    char c = peek();
    if (ident_start(c)) {
      std::size_t b = pos_;
      while (ident_char(peek())) advance();
      t.text = std::string(src_.substr(b, pos_ - b));
      t.kind = t.text == "_" ? Tok::Underscore : Tok::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(t);
    if (c == '"') return string(t);
    if (c == '\'') {
      advance();
      if (!ident_start(peek())) fail("expected a type parameter name after '", t.line, t.col);
      std::size_t b = pos_;
      while (ident_char(peek())) advance();
      t.kind = Tok::TypeParam;
      t.text = "'" + std::string(src_.substr(b, pos_ - b));
      return;
    }
    if (c == '#') {
      if (peek(1) == '{') return simple(t, Tok::HashBrace, 2);
      if (peek(1) == '=') return simple(t, Tok::HashEq, 2);
      if (ident_start(peek(1))) {
        advance();
        std::size_t b = pos_;
        while (ident_char(peek())) advance();
        t.text = std::string(src_.substr(b, pos_ - b));
        t.kind = t.text == "if" ? Tok::HashIf : Tok::HashIdent;
        return;
      }
      fail("unexpected character after '#'", t.line, t.col);
    }
    struct Punct {
      const char* s;
      Tok k;
    };
    static const Punct puncts[] = {
        {"<==>", Tok::Iff}, {"==>", Tok::Implies}, {"/\\", Tok::Wedge},
        {"\\/", Tok::Vee},  {":-", Tok::ColonDash}, {"::", Tok::ColonColon},
        {"!=", Tok::NotEq}, {"??", Tok::Query},    {"=>", Tok::FatArrow},
        {"->", Tok::Arrow}, {"<=", Tok::Le},       {">=", Tok::Ge},
        {"&&", Tok::AndAnd}, {"||", Tok::OrOr},    {"`", Tok::Backquote},
        {"(", Tok::LParen}, {")", Tok::RParen},    {"[", Tok::LBracket},
        {"]", Tok::RBracket}, {"{", Tok::LBrace},  {"}", Tok::RBrace},
        {",", Tok::Comma},  {";", Tok::Semi},      {".", Tok::Dot},
        {":", Tok::Colon},  {"=", Tok::Eq},        {"|", Tok::Bar},
        {"+", Tok::Plus},   {"-", Tok::Minus},     {"*", Tok::Star},
        {"/", Tok::Slash},  {"%", Tok::Percent},   {"<", Tok::Lt},
        {">", Tok::Gt},     {"!", Tok::Bang},      {"~", Tok::Tilde},
        {"^", Tok::Caret},
    };
    for (const auto& p : puncts)
      if (starts(p.s)) return simple(t, p.k, std::string_view(p.s).size());
    fail(std::string("unexpected character '") + c + "'", t.line, t.col);
  }

  void simple(Token& t, Tok k, std::size_t n) {
    t.kind = k;
    t.text = std::string(src_.substr(pos_, n));
    advance(n);
  }

  void number(Token& t) {
    t.kind = Tok::Int;
    std::size_t b = pos_;
    std::uint64_t v = 0;
    bool overflow = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance(2);
      if (!std::isxdigit(static_cast<unsigned char>(peek())))
        fail("malformed hexadecimal literal", t.line, t.col);
      while (std::isxdigit(static_cast<unsigned char>(peek()))) {
        char d = peek();
        int x = std::isdigit(static_cast<unsigned char>(d)) ? d - '0'
                                                            : (std::tolower(d) - 'a' + 10);
        overflow |= v >> 60 != 0;
        v = v * 16 + x;
        advance();
      }
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        std::uint64_t d = peek() - '0';
        overflow |= v > (~0ull - d) / 10;
        v = v * 10 + d;
        advance();
      }
    }
    if (peek() == 'L' || peek() == 'l') {
      t.width = 64;
      advance();
    }
    if (ident_char(peek())) fail("malformed integer literal", t.line, t.col);
    if (overflow) fail("integer literal too large", t.line, t.col);
    if (t.width == 32 && v > 0xffffffffull)
      fail("integer literal does not fit in 32 bits (use the L suffix)", t.line, t.col);
    t.ival = v;
    t.text = std::string(src_.substr(b, pos_ - b));
  }

  void string(Token& t) {
    t.kind = Tok::String;
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated string literal", t.line, t.col);
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\n') fail("newline in string literal", t.line, t.col);
      if (c == '\\') {
        char e = peek(1);
        advance(2);
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'x': {
            auto hex = [&](char h) -> int {
              if (std::isdigit(static_cast<unsigned char>(h))) return h - '0';
              if (std::isxdigit(static_cast<unsigned char>(h))) return std::tolower(h) - 'a' + 10;
              fail("malformed \\x escape", line_, col_);
            };
            int hi = hex(peek()), lo = hex(peek(1));
            advance(2);
            out += static_cast<char>(hi * 16 + lo);
            break;
          }
          default: fail(std::string("unknown escape \\") + e, line_, col_);
        }
        continue;
      }
      out += c;
      advance();
    }
    t.text = std::move(out);
  }

  std::string_view src_;
  Symbol file_;
  std::size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view src, Symbol file, int first_line) {
  return Lexer(src, file, first_line).run();
}

}  // namespace flg::detail
