#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "flg/symbol.hpp"

namespace flg {

enum class TypeKind : std::uint8_t {
  Bool,
  String,
  BitVec,
  Adt,    // data type or uninterpreted sort applied to arguments
  Param,  // rigid type variable 'a
  Smt,
  Sym,
  Model,
  Meta,  // inference variable; never survives type checking
};

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

struct TypeNode {
  TypeKind kind;
  int width = 0;      // BitVec
  Symbol name;        // Adt / Param
  std::vector<Type> args;  // Adt arguments; Smt/Sym inner at args[0]
  int meta = -1;      // Meta id
};

// Thrown by type-level partial functions (erase / toSMT) outside their domain.
struct TypeUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Type t_bool();
Type t_string();
Type t_bv(int width);
Type t_adt(Symbol name, std::vector<Type> args = {});
Type t_param(Symbol name);
Type t_smt(Type inner);
Type t_sym(Type inner);
Type t_model();
Type t_meta(int id);

inline bool is_pre_type(const Type& t) {
  return t->kind != TypeKind::Smt && t->kind != TypeKind::Sym &&
         t->kind != TypeKind::Model;
}

int type_compare(const Type& a, const Type& b);
inline bool type_equal(const Type& a, const Type& b) {
  return a == b || type_compare(a, b) == 0;
}
std::uint64_t type_hash(const Type& t);

// Source syntax, e.g. `bool list smt`, `(bv[32], string) map`.
std::string type_to_string(const Type& t);

bool type_has_params(const Type& t);
bool type_has_metas(const Type& t);
bool type_mentions_param(const Type& t, Symbol p);

Type substitute_params(const Type& t, const std::map<Symbol, Type>& sub);

// erase strips smt/sym wrappers at every depth; undefined on model.
Type erase_type(const Type& t);
// toSMT: t, smt t -> smt(erase t); sym t -> sym(erase t); undefined on model
// and on anything mentioning a type variable.
Type to_smt_type(const Type& t);

struct TypeLess {
  bool operator()(const Type& a, const Type& b) const {
    return type_compare(a, b) < 0;
  }
};

}  // namespace flg
