#include "flg/parser.hpp"

#include <algorithm>
#include <set>

#include "lexer.hpp"

namespace flg {
namespace {

using detail::Tok;
using detail::Token;

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "type", "fun", "input", "output", "uninterpreted", "sort", "match", "with",
      "end",  "let", "in",    "if",     "then",          "else", "and",   "true",
      "false", "forall", "exists"};
  return k;
}

bool is_keyword(const std::string& s) { return keywords().count(s) != 0; }

class Parser {
 public:
  Parser(std::vector<Token> toks, Symbol file) : toks_(std::move(toks)), file_(file) {}

  SourceProgram program() {
    SourceProgram p;
    while (!at(Tok::End)) p.decls.push_back(decl());
    return p;
  }

  SNodePtr lone_expression() {
    SNodePtr e = expr();
    expect(Tok::End);
    return e;
  }

 private:
  // ---- token plumbing ------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& look(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(const char* kw) const { return at(Tok::Ident) && cur().text == kw; }
  SourceSpan span() const { return {file_, cur().line, cur().col}; }

  Token take() {
    Token t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    expected_.clear();
    return t;
  }
  bool accept(Tok k) {
    if (at(k)) {
      take();
      return true;
    }
    expected_.insert(detail::tok_spelling(k));
    return false;
  }
  bool accept_kw(const char* kw) {
    if (at_kw(kw)) {
      take();
      return true;
    }
    expected_.insert(std::string("'") + kw + "'");
    return false;
  }
  Token expect(Tok k) {
    if (!at(k)) {
      expected_.insert(detail::tok_spelling(k));
      fail();
    }
    return take();
  }
  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) fail();
  }
  std::string ident() {
    if (!at(Tok::Ident) || is_keyword(cur().text)) {
      expected_.insert("identifier");
      fail();
    }
    return take().text;
  }

  [[noreturn]] void fail() {
    std::string found;
    if (at(Tok::End)) found = "end of input";
    else if (at(Tok::String)) found = "string literal";
    else found = "'" + cur().text + "'";
    std::string msg = "unexpected " + found;
    if (!expected_.empty()) {
      msg += "; expected one of: ";
      bool first = true;
      for (const auto& e : expected_) {
        if (!first) msg += ", ";
        first = false;
        msg += e;
      }
    }
    throw DiagnosticError({Severity::Error, span(), "syntax", msg});
  }
  [[noreturn]] void fail_msg(const std::string& msg) {
    throw DiagnosticError({Severity::Error, span(), "syntax", msg});
  }

  SNodePtr node(SKind k, SourceSpan sp) {
    auto n = std::make_shared<SNode>();
    n->kind = k;
    n->span = sp;
    return n;
  }

  // ---- declarations --------------------------------------------------------

  SDecl decl() {
    SDecl d;
    if (accept_kw("type")) {
      d.kind = SDecl::Kind::Types;
      do d.types.push_back(type_def());
      while (accept_kw("and"));
    } else if (at_kw("fun")) {
      d.kind = SDecl::Kind::Fun;
      take();
      d.fun = fun_def();
    } else if (at_kw("input") || at_kw("output")) {
      d.kind = SDecl::Kind::Rel;
      d.rel.span = span();
      d.rel.input = take().text == "input";
      d.rel.name = ident();
      if (accept(Tok::LParen)) {
        if (!at(Tok::RParen)) {
          do d.rel.types.push_back(type());
          while (accept(Tok::Comma));
        }
        expect(Tok::RParen);
      }
    } else if (accept_kw("uninterpreted")) {
      if (accept_kw("fun")) {
        d.kind = SDecl::Kind::Uf;
        d.uf.span = span();
        d.uf.name = ident();
        expect(Tok::LParen);
        if (!at(Tok::RParen)) {
          do d.uf.args.push_back(type());
          while (accept(Tok::Comma));
        }
        expect(Tok::RParen);
        expect(Tok::Colon);
        d.uf.ret = type();
      } else if (accept_kw("sort")) {
        d.kind = SDecl::Kind::Sort;
        d.sort.span = span();
        d.sort.params = type_params();
        d.sort.name = ident();
      } else {
        fail();
      }
    } else {
      d.kind = SDecl::Kind::Clause;
      d.clause = clause();
      return d;  // clauses end with a mandatory '.'
    }
    accept(Tok::Dot);  // optional terminator after declarations
    return d;
  }

  std::vector<std::string> type_params() {
    std::vector<std::string> ps;
    if (at(Tok::TypeParam)) {
      ps.push_back(take().text);
    } else if (at(Tok::LParen) && look(1).kind == Tok::TypeParam) {
      take();
      do ps.push_back(expect(Tok::TypeParam).text);
      while (accept(Tok::Comma));
      expect(Tok::RParen);
    }
    return ps;
  }

  STypeDef type_def() {
    STypeDef td;
    td.span = span();
    td.params = type_params();
    td.name = ident();
    expect(Tok::Eq);
    if (at(Tok::Bar)) {
      td.kind = STypeDef::Kind::Adt;
      while (accept(Tok::Bar)) td.ctors.push_back(ctor_def());
      return td;
    }
    if (accept(Tok::LBrace)) {
      td.kind = STypeDef::Kind::Record;
      while (!at(Tok::RBrace)) {
        std::string f = ident();
        expect(Tok::Colon);
        td.fields.emplace_back(f, type());
        if (!accept(Tok::Semi)) break;
      }
      expect(Tok::RBrace);
      return td;
    }
    // `c(...) | ...`, a lone `c` (constructor or alias), or an alias type
    if (at(Tok::Ident) && !is_keyword(cur().text) &&
        (look(1).kind == Tok::LParen || look(1).kind == Tok::Bar)) {
      td.kind = STypeDef::Kind::Adt;
      td.ctors.push_back(ctor_def());
      while (accept(Tok::Bar)) td.ctors.push_back(ctor_def());
      return td;
    }
    td.alias = type();
    if (at(Tok::Bar)) fail_msg("an alias cannot have alternatives");
    if (td.alias->kind == SType::Kind::Name && td.alias->args.empty())
      td.kind = STypeDef::Kind::AliasOrCtor;
    else
      td.kind = STypeDef::Kind::Alias;
    return td;
  }

  SCtor ctor_def() {
    SCtor c;
    c.span = span();
    c.name = ident();
    if (accept(Tok::LParen)) {
      do c.args.push_back(type());
      while (accept(Tok::Comma));
      expect(Tok::RParen);
    }
    return c;
  }

  std::shared_ptr<SFun> fun_def() {
    auto f = std::make_shared<SFun>();
    f->span = span();
    f->name = ident();
    if (accept(Tok::LParen)) {
      f->has_parens = true;
      if (!at(Tok::RParen)) {
        do {
          std::string x = ident();
          expect(Tok::Colon);
          f->params.emplace_back(x, type());
        } while (accept(Tok::Comma));
      }
      expect(Tok::RParen);
    }
    expect(Tok::Colon);
    f->ret = type();
    expect(Tok::Eq);
    f->body = expr();
    return f;
  }

  SClause clause() {
    SClause c;
    c.span = span();
    c.head = unary();
    if (accept(Tok::ColonDash)) {
      do c.body.push_back(expr());
      while (accept(Tok::Comma));
    }
    expect(Tok::Dot);
    return c;
  }

  // ---- types ---------------------------------------------------------------

  STypePtr type() {
    STypePtr first = postfix_type();
    if (!at(Tok::Star)) return first;
    auto t = std::make_shared<SType>();
    t->kind = SType::Kind::Tuple;
    t->span = first->span;
    t->args.push_back(first);
    while (accept(Tok::Star)) t->args.push_back(postfix_type());
    return t;
  }

  bool postfix_name_follows() const {
    if (!at(Tok::Ident) || is_keyword(cur().text)) return false;
    Tok n = look(1).kind;
    return n != Tok::LParen && n != Tok::ColonDash && n != Tok::Dot;
  }

  STypePtr postfix_type() {
    SourceSpan sp = span();
    std::vector<STypePtr> args;
    if (at(Tok::LParen) && !(look(1).kind == Tok::RParen)) {
      take();
      args.push_back(type());
      while (accept(Tok::Comma)) args.push_back(type());
      expect(Tok::RParen);
      if (args.size() > 1 && !postfix_name_follows()) {
        expected_.insert("type constructor name");
        fail();
      }
    } else {
      args.push_back(atom_type());
    }
    STypePtr t = args.size() == 1 ? args[0] : nullptr;
    while (postfix_name_follows()) {
      std::string name = take().text;
      auto n = std::make_shared<SType>();
      n->span = sp;
      if (name == "smt" || name == "sym") {
        if (!t) fail_msg("smt/sym take exactly one type argument");
        n->kind = name == "smt" ? SType::Kind::Smt : SType::Kind::Sym;
        n->args.push_back(t);
      } else {
        n->kind = SType::Kind::Name;
        n->name = name;
        n->args = t ? std::vector<STypePtr>{t} : args;
      }
      t = n;
    }
    return t;
  }

  STypePtr atom_type() {
    auto t = std::make_shared<SType>();
    t->span = span();
    if (at(Tok::TypeParam)) {
      t->kind = SType::Kind::Param;
      t->name = take().text;
      return t;
    }
    std::string name = ident();
    if (name == "bv" && accept(Tok::LBracket)) {
      t->kind = SType::Kind::BV;
      t->width = static_cast<int>(expect(Tok::Int).ival);
      expect(Tok::RBracket);
      return t;
    }
    t->kind = SType::Kind::Name;
    t->name = name;
    return t;
  }

  // ---- expressions ---------------------------------------------------------
  // Levels (low to high): ==> <==> (right) | \/ | /\ | = != | || | && |
  // #= < <= > >= | :: (right) | + - ^ | * / % | unary.

  SNodePtr expr() { return level(0); }

  static int binop_level(Tok k) {
    switch (k) {
      case Tok::Implies:
      case Tok::Iff: return 0;
      case Tok::Vee: return 1;
      case Tok::Wedge: return 2;
      case Tok::Eq:
      case Tok::NotEq: return 3;
      case Tok::OrOr: return 4;
      case Tok::AndAnd: return 5;
      case Tok::HashEq:
      case Tok::Lt:
      case Tok::Le:
      case Tok::Gt:
      case Tok::Ge: return 6;
      case Tok::ColonColon: return 7;
      case Tok::Plus:
      case Tok::Minus:
      case Tok::Caret: return 8;
      case Tok::Star:
      case Tok::Slash:
      case Tok::Percent: return 9;
      default: return -1;
    }
  }
  static bool right_assoc(int lvl) { return lvl == 0 || lvl == 7; }
  static bool non_assoc(int lvl) { return lvl == 3 || lvl == 6; }

  SNodePtr level(int lvl) {
    if (lvl > 9) return unary();
    SNodePtr lhs = level(lvl + 1);
    while (binop_level(cur().kind) == lvl) {
      SourceSpan sp = span();
      std::string op = take().text;
      SNodePtr rhs = right_assoc(lvl) ? level(lvl) : level(lvl + 1);
      auto n = node(SKind::Binary, sp);
      n->text = op;
      n->kids = {lhs, rhs};
      lhs = n;
      if (right_assoc(lvl)) break;
      if (non_assoc(lvl) && binop_level(cur().kind) == lvl)
        fail_msg("operator '" + op + "' is not associative; add parentheses");
    }
    return lhs;
  }

  SNodePtr unary() {
    SourceSpan sp = span();
    if (at(Tok::Minus) || at(Tok::Bang) || at(Tok::Tilde)) {
      std::string op = take().text;
      SNodePtr arg = unary();
      if (op == "-" && arg->kind == SKind::Int && arg->text.empty()) {
        // fold negative literals so patterns and facts can use them
        arg->ival = arg->width == 32 ? (static_cast<std::uint32_t>(-static_cast<std::uint32_t>(arg->ival)))
                                     : static_cast<std::uint64_t>(-arg->ival);
        arg->text = "-";
        arg->span = sp;
        return arg;
      }
      auto n = node(SKind::Unary, sp);
      n->text = op;
      n->kids = {arg};
      return n;
    }
    return primary();
  }

  std::vector<SNodePtr> call_args() {
    std::vector<SNodePtr> args;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      do args.push_back(expr());
      while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    return args;
  }

  SNodePtr primary() {
    SourceSpan sp = span();
    switch (cur().kind) {
      case Tok::Int: {
        Token t = take();
        auto n = node(SKind::Int, sp);
        n->ival = t.ival;
        n->width = t.width;
        return n;
      }
      case Tok::String: {
        auto n = node(SKind::String, sp);
        n->text = take().text;
        return n;
      }
      case Tok::Underscore: take(); return node(SKind::Wildcard, sp);
      case Tok::Query: take(); return node(SKind::Query, sp);
      case Tok::LParen: {
        take();
        SNodePtr first = expr();
        if (accept(Tok::RParen)) return first;
        auto n = node(SKind::Tuple, sp);
        n->kids.push_back(first);
        while (accept(Tok::Comma)) n->kids.push_back(expr());
        expect(Tok::RParen);
        return n;
      }
      case Tok::LBracket: {
        take();
        auto n = node(SKind::List, sp);
        if (!at(Tok::RBracket)) {
          do n->kids.push_back(expr());
          while (accept(Tok::Comma));
        }
        expect(Tok::RBracket);
        return n;
      }
      case Tok::LBrace: return record(sp);
      case Tok::Backquote: {
        take();
        auto n = node(SKind::Quote, sp);
        n->kids.push_back(expr());
        expect(Tok::Backquote);
        return n;
      }
      case Tok::HashBrace: {
        take();
        auto n = node(SKind::SmtVar, sp);
        n->kids.push_back(expr());
        expect(Tok::RBrace);
        expect(Tok::LBracket);
        n->type = type();
        expect(Tok::RBracket);
        return n;
      }
      case Tok::HashIdent: {
        std::string name = take().text;
        if (accept(Tok::LBracket)) {
          auto n = node(SKind::SmtVarId, sp);
          n->text = name;
          n->type = type();
          expect(Tok::RBracket);
          return n;
        }
        if (at(Tok::LParen)) {
          if (name.rfind("is_", 0) == 0 && name.size() > 3) {
            auto n = node(SKind::Tester, sp);
            n->text = name.substr(3);
            n->kids = call_args();
            return n;
          }
          auto us = name.rfind('_');
          if (us != std::string::npos && us + 1 < name.size() && us > 0 &&
              std::all_of(name.begin() + us + 1, name.end(),
                          [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            auto n = node(SKind::Getter, sp);
            n->text = name.substr(0, us);
            n->index = std::stoi(name.substr(us + 1));
            n->kids = call_args();
            return n;
          }
          fail_msg("'#" + name + "' is neither a tester (#is_c) nor a getter (#c_i)");
        }
        expected_.insert("'['");
        expected_.insert("'('");
        fail();
      }
      case Tok::HashIf: {
        take();
        auto n = node(SKind::SmtIf, sp);
        n->kids.push_back(expr());
        expect_kw("then");
        n->kids.push_back(expr());
        expect_kw("else");
        n->kids.push_back(expr());
        return n;
      }
      case Tok::Ident: return ident_form(sp);
      default:
        expected_.insert("expression");
        fail();
    }
  }

  SNodePtr record(SourceSpan sp) {
    expect(Tok::LBrace);
    SNodePtr n;
    if (at(Tok::Ident) && !is_keyword(cur().text) && look(1).kind == Tok::Eq) {
      n = node(SKind::Record, sp);
    } else {
      n = node(SKind::RecordUpdate, sp);
      n->kids.push_back(expr());
      expect_kw("with");
    }
    while (!at(Tok::RBrace)) {
      n->fields.push_back(ident());
      expect(Tok::Eq);
      n->kids.push_back(expr());
      if (!accept(Tok::Semi)) break;
    }
    expect(Tok::RBrace);
    return n;
  }

  SNodePtr ident_form(SourceSpan sp) {
    const std::string& w = cur().text;
    if (w == "true" || w == "false") {
      auto n = node(SKind::Bool, sp);
      n->bval = take().text == "true";
      return n;
    }
    if (w == "if") {
      take();
      auto n = node(SKind::If, sp);
      n->kids.push_back(expr());
      expect_kw("then");
      n->kids.push_back(expr());
      expect_kw("else");
      n->kids.push_back(expr());
      return n;
    }
    if (w == "let") {
      take();
      if (accept_kw("fun")) {
        auto n = node(SKind::LetFun, sp);
        n->fun = fun_def();
        expect_kw("in");
        n->kids.push_back(expr());
        return n;
      }
      auto n = node(SKind::Let, sp);
      n->kids.push_back(level(7));  // pattern: no '=' at this level
      expect(Tok::Eq);
      n->kids.push_back(expr());
      expect_kw("in");
      n->kids.push_back(expr());
      return n;
    }
    if (w == "match") {
      take();
      auto n = node(SKind::Match, sp);
      n->kids.push_back(expr());
      expect_kw("with");
      bool first = true;
      while (!at_kw("end")) {
        if (!accept(Tok::Bar) && !first) {
          expected_.insert("'end'");
          fail();
        }
        first = false;
        SCase c;
        c.pat = level(7);
        expect(Tok::FatArrow);
        c.body = expr();
        n->cases.push_back(c);
      }
      expect_kw("end");
      return n;
    }
    if (w == "forall" || w == "exists") {
      take();
      auto n = node(SKind::Quant, sp);
      n->exists = w == "exists";
      std::vector<SNodePtr> vars, pats;
      do vars.push_back(unary());
      while (accept(Tok::Comma));
      if (accept(Tok::Colon)) {
        do pats.push_back(level(1));
        while (accept(Tok::Comma));
      }
      expect(Tok::Dot);
      n->nvars = static_cast<int>(vars.size());
      n->npats = static_cast<int>(pats.size());
      n->kids = vars;
      n->kids.insert(n->kids.end(), pats.begin(), pats.end());
      n->kids.push_back(expr());
      return n;
    }
    std::string name = ident();
    if (at(Tok::LBracket)) {
      take();
      auto n = node(SKind::IndexedCall, sp);
      n->text = name;
      if (at(Tok::Int)) {
        n->index = static_cast<int>(take().ival);
      } else {
        n->type = type();
      }
      expect(Tok::RBracket);
      if (at(Tok::LParen)) n->kids = call_args();
      return n;
    }
    if (at(Tok::LParen)) {
      auto n = node(SKind::Call, sp);
      n->text = name;
      n->kids = call_args();
      return n;
    }
    auto n = node(SKind::Ident, sp);
    n->text = name;
    return n;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Symbol file_;
  std::set<std::string> expected_;
};

}  // namespace

SourceProgram parse_program(std::string_view text, const std::string& path) {
  Symbol file(path);
  Parser p(detail::lex(text, file), file);
  SourceProgram prog = p.program();
  prog.path = path;
  prog.text = std::string(text);
  return prog;
}

SNodePtr parse_expression(std::string_view text, const std::string& path, int line) {
  Symbol file(path);
  Parser p(detail::lex(text, file, line), file);
  return p.lone_expression();
}

}  // namespace flg
