// Δ;Φ ⊨ W: typing of run-time values, used by the preservation checks.

#include <map>

#include "flg/typecheck.hpp"

namespace flg {
namespace {

bool same(const Type& a, const Type& b) { return a && b && type_equal(a, b); }

Type instantiate_arg(const Program& p, Symbol ctor, std::size_t i, const Type& adt) {
  const CtorDecl& cd = p.ctors.at(ctor);
  const AdtDecl& ad = p.adts.at(cd.adt);
  std::map<Symbol, Type> inst;
  for (std::size_t k = 0; k < ad.params.size() && k < adt->args.size(); ++k)
    inst[ad.params[k]] = adt->args[k];
  return substitute_params(cd.args[i], inst);
}

Type sort_of(const Program& p, const Value& v);

bool formula_arg(const Program& p, const Value& a, bool want_sym, const Type& t) {
  if (want_sym)
    return a->kind == TermKind::Smt && a->op == SmtOp::Var && same(a->type, t);
  return same(sort_of(p, a), t);
}

Type sort_of(const Program& p, const Value& v) {
  if (v->kind != TermKind::Smt) return nullptr;
  const Type b = t_bool();
  auto all = [&](const Type& t, std::size_t from = 0) {
    for (std::size_t i = from; i < v->args.size(); ++i)
      if (!same(sort_of(p, v->args[i]), t)) return false;
    return true;
  };
  switch (v->op) {
    case SmtOp::Var: return v->type;
    case SmtOp::Const: {
      TermKind k = v->args[0]->kind;
      if (k != TermKind::Bool && k != TermKind::BitVec && k != TermKind::String) return nullptr;
      return typeof_constant(v->args[0]);
    }
    case SmtOp::Ctor: {
      const CtorDecl* cd = p.ctor(v->sym);
      if (!v->type || !cd || cd->args.size() != v->args.size() || v->type->kind != TypeKind::Adt ||
          v->type->name != cd->adt)
        return nullptr;
      for (std::size_t i = 0; i < v->args.size(); ++i) {
        Type tau = instantiate_arg(p, v->sym, i, v->type);
        bool sym = tau->kind == TypeKind::Sym;
        if (!formula_arg(p, v->args[i], sym, erase_type(tau))) return nullptr;
      }
      return v->type;
    }
    case SmtOp::Uf: {
      const UfDecl* u = p.uf(v->sym);
      if (!u || u->args.size() != v->args.size()) return nullptr;
      for (std::size_t i = 0; i < v->args.size(); ++i)
        if (!same(sort_of(p, v->args[i]), erase_type(u->args[i]))) return nullptr;
      return erase_type(u->ret);
    }
    case SmtOp::Not:
    case SmtOp::And:
    case SmtOp::Or:
    case SmtOp::Imp:
    case SmtOp::Iff: return all(b) ? b : nullptr;
    case SmtOp::Eq: return v->type && all(v->type) ? b : nullptr;
    case SmtOp::Ite: {
      Type t = sort_of(p, v->args[1]);
      return same(sort_of(p, v->args[0]), b) && same(sort_of(p, v->args[2]), t) ? t : nullptr;
    }
    case SmtOp::Let: {
      const Value& x = v->args[0];
      if (x->kind != TermKind::Smt || x->op != SmtOp::Var) return nullptr;
      if (!same(sort_of(p, v->args[1]), x->type)) return nullptr;
      return sort_of(p, v->args[2]);
    }
    case SmtOp::Forall:
    case SmtOp::Exists: {
      std::size_t n = static_cast<std::size_t>(v->index);
      if (v->args.size() <= n) return nullptr;
      for (std::size_t i = 0; i < n; ++i)
        if (v->args[i]->kind != TermKind::Smt || v->args[i]->op != SmtOp::Var) return nullptr;
      if (!same(sort_of(p, v->args[n]), b)) return nullptr;
      for (std::size_t i = n + 1; i < v->args.size(); ++i)
        if (!sort_of(p, v->args[i])) return nullptr;
      return b;
    }
    case SmtOp::Tester:
    case SmtOp::Getter: {
      const CtorDecl* cd = p.ctor(v->sym);
      if (!cd || !v->type || !same(sort_of(p, v->args[0]), v->type)) return nullptr;
      if (v->op == SmtOp::Tester) return b;
      if (v->index < 1 || v->index > static_cast<int>(cd->args.size())) return nullptr;
      return erase_type(instantiate_arg(p, v->sym, v->index - 1, v->type));
    }
    case SmtOp::BvConst:
      if (v->index != 32 && v->index != 64) return nullptr;
      return same(sort_of(p, v->args[0]), t_bv(32)) ? t_bv(v->index) : nullptr;
    case SmtOp::BvNeg:
    case SmtOp::BvNot: {
      Type t = sort_of(p, v->args[0]);
      return t && t->kind == TypeKind::BitVec ? t : nullptr;
    }
    default: {
      Type t = sort_of(p, v->args[0]);
      if (!t || t->kind != TypeKind::BitVec || !same(sort_of(p, v->args[1]), t)) return nullptr;
      return v->op >= SmtOp::BvSlt ? b : t;
    }
  }
}

}  // namespace

Type formula_sort(const Program& prog, const Value& v) {
  try {
    return sort_of(prog, v);
  } catch (const std::exception&) {
    return nullptr;
  }
}

bool value_has_type(const Program& prog, const Value& v, const Type& t) {
  switch (t->kind) {
    case TypeKind::Bool: return v->kind == TermKind::Bool;
    case TypeKind::String: return v->kind == TermKind::String;
    case TypeKind::BitVec: return v->kind == TermKind::BitVec && v->width == t->width;
    case TypeKind::Model: return v->kind == TermKind::Model;
    case TypeKind::Adt: {
      if (v->kind != TermKind::Ctor) return false;
      const CtorDecl* cd = prog.ctor(v->sym);
      if (!cd || cd->adt != t->name || cd->args.size() != v->args.size()) return false;
      for (std::size_t i = 0; i < v->args.size(); ++i)
        if (!value_has_type(prog, v->args[i], instantiate_arg(prog, v->sym, i, t))) return false;
      return true;
    }
    case TypeKind::Smt: return same(formula_sort(prog, v), erase_type(t->args[0]));
    case TypeKind::Sym:
      return v->kind == TermKind::Smt && v->op == SmtOp::Var &&
             same(formula_sort(prog, v), erase_type(t->args[0]));
    case TypeKind::Param:
    case TypeKind::Meta: return true;
  }
  return false;
}

}  // namespace flg
