#pragma once

// Parse tree of the concrete syntax, before name resolution and desugaring.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flg/diagnostics.hpp"

namespace flg {

struct SType;
using STypePtr = std::shared_ptr<SType>;

struct SType {
  enum class Kind : std::uint8_t { Name, Param, BV, Tuple, Smt, Sym } kind = Kind::Name;
  std::string name;  // Name / Param
  int width = 0;     // BV
  std::vector<STypePtr> args;  // Name arguments, Tuple parts, Smt/Sym inner
  SourceSpan span;
};

struct SNode;
using SNodePtr = std::shared_ptr<SNode>;
struct SFun;

enum class SKind : std::uint8_t {
  Ident,
  Wildcard,      // _
  Query,         // ??
  Int,
  Bool,
  String,
  Call,          // text(kids)
  IndexedCall,   // text[index](kids), e.g. bv_const[64](x), smt_eq[bool](a, b)
  Tuple,
  List,
  Binary,        // text = operator
  Unary,         // text = operator
  If,            // kids: cond, then, else
  SmtIf,         // #if ... then ... else
  Let,           // kids: pattern, bound, body
  LetFun,        // fun + kids[0] body
  Match,         // kids[0] scrutinee; cases
  Record,        // fields + kids
  RecordUpdate,  // kids[0] base; fields + kids[1..]
  Quote,
  SmtVar,        // #{kids[0]}[type]
  SmtVarId,      // #text[type]
  Tester,        // #is_text(kids[0])
  Getter,        // #text_index(kids[0])
  Quant,         // forall/exists: kids = vars..., patterns..., body
};

struct SCase {
  SNodePtr pat;
  SNodePtr body;
};

struct SNode {
  SKind kind = SKind::Ident;
  SourceSpan span;
  std::string text;
  std::uint64_t ival = 0;  // Int payload (two's complement bits)
  int width = 32;          // Int width
  bool bval = false;
  bool exists = false;     // Quant
  int nvars = 0;           // Quant
  int npats = 0;           // Quant
  int index = 0;           // Getter index; IndexedCall integer index
  STypePtr type;           // SmtVar(Id) type; IndexedCall type index
  std::vector<std::string> fields;
  std::vector<SNodePtr> kids;
  std::vector<SCase> cases;
  std::shared_ptr<SFun> fun;  // LetFun
};

struct SCtor {
  std::string name;
  std::vector<STypePtr> args;
  SourceSpan span;
};

struct STypeDef {
  enum class Kind : std::uint8_t { Adt, Record, Alias, AliasOrCtor } kind = Kind::Adt;
  std::vector<std::string> params;
  std::string name;
  std::vector<SCtor> ctors;
  std::vector<std::pair<std::string, STypePtr>> fields;
  STypePtr alias;
  SourceSpan span;
};

struct SFun {
  std::string name;
  bool has_parens = false;  // `fun f() : t` vs `fun f : t`
  std::vector<std::pair<std::string, STypePtr>> params;
  STypePtr ret;
  SNodePtr body;
  SourceSpan span;
};

struct SRel {
  std::string name;
  bool input = false;
  std::vector<STypePtr> types;
  SourceSpan span;
};

struct SUf {
  std::string name;
  std::vector<STypePtr> args;
  STypePtr ret;
  SourceSpan span;
};

struct SSort {
  std::string name;
  std::vector<std::string> params;
  SourceSpan span;
};

struct SClause {
  SNodePtr head;
  std::vector<SNodePtr> body;
  SourceSpan span;
};

struct SDecl {
  enum class Kind : std::uint8_t { Types, Fun, Rel, Uf, Sort, Clause } kind = Kind::Clause;
  std::vector<STypeDef> types;
  std::shared_ptr<SFun> fun;
  SRel rel;
  SUf uf;
  SSort sort;
  SClause clause;
};

struct SourceProgram {
  std::string path;
  std::string text;
  std::vector<SDecl> decls;
};

}  // namespace flg
