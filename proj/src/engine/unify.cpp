#include "flg/diagnostics.hpp"
#include "flg/engine.hpp"

namespace flg {

bool unify_value(Substitution& theta, const Term& u, const Value& v) {
  if (u->ground) return term_equal(u, v);
  if (u->kind == TermKind::Var) {
    if (const Value* b = theta.find(u->sym)) return term_equal(*b, v);
    theta.bind(u->sym, v);
    return true;
  }
  if (u->kind != v->kind || u->sym != v->sym || u->args.size() != v->args.size())
    return false;
  if (u->kind == TermKind::Smt) {
    if (u->op != v->op || u->index != v->index) return false;
    if (static_cast<bool>(u->type) != static_cast<bool>(v->type)) return false;
    if (u->type && !type_equal(u->type, v->type)) return false;
  } else if (u->kind != TermKind::Ctor) {
    return false;
  }
  // Vector folding: left to right, threading θ.
  for (std::size_t i = 0; i < u->args.size(); ++i)
    if (!unify_value(theta, u->args[i], v->args[i])) return false;
  return true;
}

bool unify_terms(Substitution& theta, const Term& u1, const Term& u2) {
  if (theta.ground_under(u1)) return unify_value(theta, u2, theta.apply(u1));
  if (theta.ground_under(u2)) return unify_value(theta, u1, theta.apply(u2));
  throw RuntimeError("uu-FF", "neither side of the unification is ground: " + to_source(u1) +
                                  " and " + to_source(u2));
}

}  // namespace flg
