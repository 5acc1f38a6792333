#include "flg/types.hpp"

namespace flg {
namespace {

Type make(TypeKind k) {
  auto n = std::make_shared<TypeNode>();
  n->kind = k;
  return n;
}

Type wrap(TypeKind k, Type inner) {
  if (!is_pre_type(inner))
    throw std::invalid_argument("smt/sym may only wrap a pre-type, got " +
                                type_to_string(inner));
  auto n = std::make_shared<TypeNode>();
  n->kind = k;
  n->args.push_back(std::move(inner));
  return n;
}

}  // namespace

Type t_bool() {
  static const Type k = make(TypeKind::Bool);
  return k;
}
Type t_string() {
  static const Type k = make(TypeKind::String);
  return k;
}
Type t_model() {
  static const Type k = make(TypeKind::Model);
  return k;
}

Type t_bv(int width) {
  static const Type b32 = [] {
    auto n = std::make_shared<TypeNode>();
    n->kind = TypeKind::BitVec;
    n->width = 32;
    return Type(n);
  }();
  static const Type b64 = [] {
    auto n = std::make_shared<TypeNode>();
    n->kind = TypeKind::BitVec;
    n->width = 64;
    return Type(n);
  }();
  if (width == 32) return b32;
  if (width == 64) return b64;
  throw std::invalid_argument("unsupported bit-vector width " +
                              std::to_string(width));
}

Type t_adt(Symbol name, std::vector<Type> args) {
  auto n = std::make_shared<TypeNode>();
  n->kind = TypeKind::Adt;
  n->name = name;
  n->args = std::move(args);
  return n;
}

Type t_param(Symbol name) {
  auto n = std::make_shared<TypeNode>();
  n->kind = TypeKind::Param;
  n->name = name;
  return n;
}

Type t_smt(Type inner) { return wrap(TypeKind::Smt, std::move(inner)); }
Type t_sym(Type inner) { return wrap(TypeKind::Sym, std::move(inner)); }

Type t_meta(int id) {
  auto n = std::make_shared<TypeNode>();
  n->kind = TypeKind::Meta;
  n->meta = id;
  return n;
}

int type_compare(const Type& a, const Type& b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case TypeKind::BitVec:
      return a->width == b->width ? 0 : (a->width < b->width ? -1 : 1);
    case TypeKind::Meta:
      return a->meta == b->meta ? 0 : (a->meta < b->meta ? -1 : 1);
    case TypeKind::Param:
    case TypeKind::Adt:
      if (a->name != b->name) return a->name < b->name ? -1 : 1;
      break;
    default:
      break;
  }
  if (a->args.size() != b->args.size())
    return a->args.size() < b->args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (int c = type_compare(a->args[i], b->args[i])) return c;
  return 0;
}

std::uint64_t type_hash(const Type& t) {
  std::uint64_t h = hash_mix(kFnvOffset, static_cast<std::uint64_t>(t->kind));
  switch (t->kind) {
    case TypeKind::BitVec: h = hash_mix(h, t->width); break;
    case TypeKind::Meta: h = hash_mix(h, static_cast<std::uint64_t>(t->meta)); break;
    case TypeKind::Adt:
    case TypeKind::Param: h = hash_mix(h, t->name.stable_hash()); break;
    default: break;
  }
  for (const auto& a : t->args) h = hash_mix(h, type_hash(a));
  return h;
}

namespace {

bool needs_parens(const Type& t) {
  // postfix applications are fine unparenthesised; tuple types are not
  return t->kind == TypeKind::Adt && t->name.str().rfind("tuple", 0) == 0 &&
         t->args.size() >= 2 && t->name.str() == "tuple" + std::to_string(t->args.size());
}

}  // namespace

std::string type_to_string(const Type& t) {
  switch (t->kind) {
    case TypeKind::Bool: return "bool";
    case TypeKind::String: return "string";
    case TypeKind::Model: return "model";
    case TypeKind::BitVec: return "bv[" + std::to_string(t->width) + "]";
    case TypeKind::Param: return t->name.str();
    case TypeKind::Meta: return "?" + std::to_string(t->meta);
    case TypeKind::Smt:
    case TypeKind::Sym: {
      std::string in = type_to_string(t->args[0]);
      if (needs_parens(t->args[0])) in = "(" + in + ")";
      return in + (t->kind == TypeKind::Smt ? " smt" : " sym");
    }
    case TypeKind::Adt: {
      if (needs_parens(t)) {
        std::string s = "(";
        for (std::size_t i = 0; i < t->args.size(); ++i) {
          if (i) s += " * ";
          std::string a = type_to_string(t->args[i]);
          if (needs_parens(t->args[i])) a = "(" + a + ")";
          s += a;
        }
        return s + ")";
      }
      if (t->args.empty()) return t->name.str();
      if (t->args.size() == 1) {
        std::string a = type_to_string(t->args[0]);
        if (needs_parens(t->args[0])) a = "(" + a + ")";
        return a + " " + t->name.str();
      }
      std::string s = "(";
      for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) s += ", ";
        s += type_to_string(t->args[i]);
      }
      return s + ") " + t->name.str();
    }
  }
  return "?";
}

bool type_has_params(const Type& t) {
  if (t->kind == TypeKind::Param) return true;
  for (const auto& a : t->args)
    if (type_has_params(a)) return true;
  return false;
}

bool type_has_metas(const Type& t) {
  if (t->kind == TypeKind::Meta) return true;
  for (const auto& a : t->args)
    if (type_has_metas(a)) return true;
  return false;
}

bool type_mentions_param(const Type& t, Symbol p) {
  if (t->kind == TypeKind::Param) return t->name == p;
  for (const auto& a : t->args)
    if (type_mentions_param(a, p)) return true;
  return false;
}

Type substitute_params(const Type& t, const std::map<Symbol, Type>& sub) {
  if (t->kind == TypeKind::Param) {
    auto it = sub.find(t->name);
    return it == sub.end() ? t : it->second;
  }
  if (t->args.empty()) return t;
  std::vector<Type> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute_params(a, sub));
    changed |= args.back() != a;
  }
  if (!changed) return t;
  auto n = std::make_shared<TypeNode>(*t);
  n->args = std::move(args);
  // substituting into smt/sym may not produce nested wrappers
  if ((n->kind == TypeKind::Smt || n->kind == TypeKind::Sym) &&
      !is_pre_type(n->args[0]))
    throw std::invalid_argument("substitution produced a nested smt/sym type");
  return n;
}

Type erase_type(const Type& t) {
  switch (t->kind) {
    case TypeKind::Model: throw TypeUndefined("erase is undefined on model");
    case TypeKind::Smt:
    case TypeKind::Sym: return erase_type(t->args[0]);
    case TypeKind::Adt: {
      if (t->args.empty()) return t;
      std::vector<Type> args;
      for (const auto& a : t->args) args.push_back(erase_type(a));
      return t_adt(t->name, std::move(args));
    }
    default: return t;
  }
}

Type to_smt_type(const Type& t) {
  if (t->kind == TypeKind::Model)
    throw TypeUndefined("toSMT is undefined on model");
  if (type_has_params(t))
    throw TypeUndefined("toSMT is undefined on a type with type variables: " +
                        type_to_string(t));
  if (t->kind == TypeKind::Sym) return t_sym(erase_type(t->args[0]));
  return t_smt(erase_type(t));
}

}  // namespace flg
