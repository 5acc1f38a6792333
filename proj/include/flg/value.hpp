#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flg/symbol.hpp"
#include "flg/types.hpp"

namespace flg {

class SmtModel;
struct TermNode;
using Term = std::shared_ptr<const TermNode>;

enum class TermKind : std::uint8_t {
  Bool,
  BitVec,
  String,
  Ctor,   // user (or built-in) constructor application
  Smt,    // reified formula constructor
  Model,  // opaque solver model
  Var,    // rule variable; only in unifiable terms, never in values
};

// The c^SMT family. Indices live on the node (sym / type / index fields).
enum class SmtOp : std::uint8_t {
  Var,     // args[0] = name value; type = variable's pre-type
  Const,   // args[0] = constant value
  Ctor,    // sym = constructor; type = instantiated ADT pre-type (may be null)
  Uf,      // sym = uninterpreted function
  Not,
  And,
  Or,
  Imp,
  Iff,
  Eq,      // type = operand pre-type
  Ite,
  Let,     // args = [var, bound, body]
  Forall,  // index = #bound vars; args = vars..., body, patterns...
  Exists,
  Tester,  // sym = constructor
  Getter,  // sym = constructor, index = 1-based argument
  BvConst, // index = width; args[0] = 32-bit value formula
  BvNeg,
  BvNot,
  BvAdd,
  BvSub,
  BvMul,
  BvSdiv,
  BvSrem,
  BvUdiv,
  BvUrem,
  BvAnd,
  BvOr,
  BvXor,
  BvShl,
  BvLshr,
  BvAshr,
  BvSlt,
  BvSle,
  BvSgt,
  BvSge,
  BvUlt,
  BvUle,
  BvUgt,
  BvUge,
};

const char* smt_op_name(SmtOp op);  // source-level name, e.g. "bv_add"

using Value = Term;  // a Term with no Var nodes

struct TermNode {
  TermKind kind;
  SmtOp op = SmtOp::Var;
  bool ground = true;
  int width = 0;            // BitVec width
  int index = 0;            // Smt Forall/Exists var count, Getter index, BvConst width
  std::uint64_t bits = 0;   // Bool (0/1) and BitVec payload (zero-extended)
  std::uint64_t hash = 0;   // stable structural hash
  Symbol sym;               // Ctor name, Var name, Smt ctor/uf/tester/getter
  std::string str;          // String payload
  Type type;                // Smt index type (may be null)
  std::vector<Term> args;
  std::shared_ptr<const SmtModel> model;
};

Term mk_bool(bool b);
Term mk_bv32(std::int32_t v);
Term mk_bv64(std::int64_t v);
Term mk_bv(int width, std::uint64_t bits);
Term mk_string(std::string s);
Term mk_ctor(Symbol c, std::vector<Term> args = {});
Term mk_var(Symbol name);
Term mk_model(std::shared_ptr<const SmtModel> m);
Term mk_smt(SmtOp op, std::vector<Term> args, Symbol sym = Symbol(),
            Type type = nullptr, int index = 0);

// Convenience builders for the common formula shapes.
Term smt_var(Term name, Type pre_type);
Term smt_const(Term k);

inline bool is_ground(const Term& t) { return t->ground; }
inline bool as_bool(const Term& t) { return t->bits != 0; }
std::int64_t bv_signed(const Term& t);

// Total order: kind rank, then per kind. Constructor-like nodes order by
// arity, then name, then arguments left to right.
int term_compare(const Term& a, const Term& b);
bool term_equal(const Term& a, const Term& b);

struct TermLess {
  bool operator()(const Term& a, const Term& b) const {
    return term_compare(a, b) < 0;
  }
};
struct TermHash {
  std::size_t operator()(const Term& t) const { return t->hash; }
};
struct TermEq {
  bool operator()(const Term& a, const Term& b) const { return term_equal(a, b); }
};

bool occurs_subterm(const Term& needle, const Term& hay);

// Source syntax, re-readable by the parser for every non-model value.
std::string to_source(const Term& t);
std::string escape_string(const std::string& s);

// Names of the built-in data types.
namespace names {
Symbol list();
Symbol nil();
Symbol cons();
Symbol option();
Symbol none();
Symbol some();
Symbol tuple(int n);  // tuple2 .. tuple8
int tuple_arity(Symbol s);  // 0 when not a tuple constructor
bool is_record_ctor(Symbol s);
}  // namespace names

Term mk_list(const std::vector<Term>& elems);
Term mk_tuple(std::vector<Term> elems);  // 1 element returns it unchanged

// Solver model: SMT variable terms mapped to concrete values, sorted by key.
class SmtModel {
 public:
  std::vector<std::pair<Term, Value>> entries;
  void normalize();  // sort + dedup by key
  std::optional<Value> lookup(const Term& var) const;
};
int model_compare(const SmtModel& a, const SmtModel& b);

// Records print as `{f=v; ...}`; the desugarer registers their field names.
void register_record(Symbol ctor, std::vector<Symbol> fields);
const std::vector<Symbol>* record_fields(Symbol ctor);

using Tuple = std::vector<Value>;
int tuple_compare(const Tuple& a, const Tuple& b);
std::uint64_t tuple_hash(const Tuple& t);

}  // namespace flg
