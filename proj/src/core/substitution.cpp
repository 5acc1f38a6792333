#include "flg/substitution.hpp"

#include <stdexcept>

namespace flg {

void Substitution::bind(Symbol x, Value v) {
  if (bound(x)) throw std::logic_error("variable rebound: " + x.str());
  binds_.emplace_back(x, std::move(v));
}

Term Substitution::apply(const Term& u) const {
  if (u->ground) return u;
  if (u->kind == TermKind::Var) {
    const Value* v = find(u->sym);
    return v ? *v : u;
  }
  std::vector<Term> args;
  args.reserve(u->args.size());
  bool changed = false;
  for (const auto& a : u->args) {
    args.push_back(apply(a));
    changed |= args.back() != a;
  }
  if (!changed) return u;
  if (u->kind == TermKind::Ctor) return mk_ctor(u->sym, std::move(args));
  return mk_smt(u->op, std::move(args), u->sym, u->type, u->index);
}

bool Substitution::ground_under(const Term& u) const {
  if (u->ground) return true;
  if (u->kind == TermKind::Var) return bound(u->sym);
  for (const auto& a : u->args)
    if (!ground_under(a)) return false;
  return true;
}

}  // namespace flg
