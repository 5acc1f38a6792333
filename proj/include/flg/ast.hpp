#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flg/diagnostics.hpp"
#include "flg/types.hpp"
#include "flg/value.hpp"

namespace flg {

// Built-in ML operators (⊗) and the SMT interface operators.
enum class BuiltinOp : std::uint8_t {
  Add, Sub, Mul, Div, Rem, Neg,
  Lt, Le, Gt, Ge,
  Eq, Ne,
  And, Or, Not,
  Concat, ToString,
  IsSat, IsValid, IsSatOpt, GetModel, QueryModel,
};
const char* builtin_name(BuiltinOp op);

enum class ExprKind : std::uint8_t {
  Var,
  Const,
  Ctor,
  Call,
  RelQuery,  // predicate used as a function: p(w...)
  Op,
  Match,
  Let,
  If,
  Quote,    // args[0] is a formula
  Unquote,  // formula mode: args[0] is an expression
  Smt,      // formula-mode c^SMT constructor application
};

enum class QueryArg : std::uint8_t { Expr, Wildcard, Ignore };

struct Pattern {
  enum class Kind : std::uint8_t { Var, Wild, Const, Ctor } kind = Kind::Wild;
  Symbol name;     // Var / Ctor
  Value constant;  // Const
  std::vector<Pattern> args;
  SourceSpan span;
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct MatchCase {
  Pattern pat;
  ExprPtr body;
};

struct Expr {
  ExprKind kind = ExprKind::Const;
  SourceSpan span;
  Symbol name;       // Var, Ctor, Call, RelQuery, Let binder, Smt ctor/uf/tester/getter
  Value constant;    // Const
  BuiltinOp op = BuiltinOp::Add;
  SmtOp smt_op = SmtOp::Var;
  int index = 0;     // Smt: getter index, bv_const width, quantifier var count
  Type annot;        // Smt Var: declared pre-type; explicit index type (smt_eq[t])
  std::vector<ExprPtr> args;
  std::vector<QueryArg> query;  // RelQuery: one entry per argument; args[i] null unless Expr
  std::vector<MatchCase> cases;

  // Filled by the type checker.
  Type type;       // exp-mode type, or formula type (smt t / sym t)
  Type smt_index;  // Smt Ctor: instantiated ADT pre-type; Eq: operand pre-type
};

ExprPtr make_expr(ExprKind k, SourceSpan span);

enum class PremiseKind : std::uint8_t { PosAtom, NegAtom, Eq, NegEq };

struct Premise {
  PremiseKind kind = PremiseKind::PosAtom;
  SourceSpan span;
  Symbol rel;                // atoms
  std::vector<Symbol> vars;  // atoms
  Symbol var;                // Eq / NegEq: var = expr
  ExprPtr expr;
};

struct Clause {
  Symbol head;
  std::vector<Symbol> head_vars;
  std::vector<Premise> body;
  SourceSpan span;
  int id = 0;
  bool fact = false;  // written without a body
};

struct AdtDecl {
  Symbol name;
  std::vector<Symbol> params;
  std::vector<Symbol> ctors;  // declaration order
  bool uninterpreted_sort = false;
  bool builtin = false;
  std::vector<Symbol> fields;  // records: field names (one constructor)
  SourceSpan span;
};

struct CtorDecl {
  Symbol name;
  Symbol adt;
  std::vector<Type> args;  // over the ADT's parameters
  SourceSpan span;
};

struct FunDecl {
  Symbol name;
  std::vector<Symbol> type_params;
  std::vector<Symbol> params;
  std::vector<Type> param_types;  // null entries: inferred (lifted captures)
  Type ret;                       // null: inferred (only for lifted functions)
  ExprPtr body;
  SourceSpan span;
  bool lifted = false;
  bool getter = false;  // generated record field getter
};

struct RelDecl {
  Symbol name;
  std::vector<Type> types;
  bool input = false;
  SourceSpan span;
};

struct UfDecl {
  Symbol name;
  std::vector<Type> args;
  Type ret;
  SourceSpan span;
};

struct TypeAlias {
  std::vector<Symbol> params;
  Type body;
};

struct Stratum {
  std::vector<Symbol> relations;
  std::vector<int> clauses;  // indices into Program::clauses
  bool recursive = false;
};

struct Program {
  std::string path;
  std::map<Symbol, AdtDecl> adts;
  std::map<Symbol, CtorDecl> ctors;
  std::map<Symbol, FunDecl> funs;
  std::map<Symbol, RelDecl> rels;
  std::map<Symbol, UfDecl> ufs;
  std::map<Symbol, TypeAlias> aliases;
  std::vector<Symbol> fun_order;  // declaration order (lifted functions first)
  std::vector<Symbol> rel_order;
  std::vector<Clause> clauses;
  std::vector<Stratum> strata;  // filled by validation

  const CtorDecl* ctor(Symbol c) const;
  const FunDecl* fun(Symbol f) const;
  const RelDecl* rel(Symbol p) const;
  const UfDecl* uf(Symbol f) const;
  const AdtDecl* adt(Symbol d) const;
};

// Pretty-printer over the core grammar (debugging and structural scans).
std::string to_string(const Expr& e);
std::string to_string(const Premise& p);
std::string to_string(const Clause& c);
std::string to_string(const Pattern& p);

// Free rule/ML variables of an expression (names bound by let/match excluded).
void free_vars(const Expr& e, std::vector<Symbol>& out);

}  // namespace flg
