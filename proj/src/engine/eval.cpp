// Big-step evaluation of ML expressions and reified formulas.

#include <algorithm>
#include <limits>

#include "engine/evaluator.hpp"
#include "flg/smt.hpp"

namespace flg {

Value to_smt_value(const Program& prog, const Value& v, const Type& type) {
  switch (v->kind) {
    case TermKind::Smt: return v;
    case TermKind::Bool:
    case TermKind::BitVec:
    case TermKind::String: return smt_const(v);
    case TermKind::Model: throw RuntimeError("φ-Unquote", "a model cannot be used as a formula");
    case TermKind::Var: throw RuntimeError("uu-FF", "unbound variable inside a formula");
    case TermKind::Ctor: break;
  }
  const CtorDecl* cd = prog.ctor(v->sym);
  if (!cd || cd->args.size() != v->args.size())
    throw RuntimeError("φ-Unquote", "unknown constructor " + v->sym.str() + " in a formula");
  Type t = type && type->kind == TypeKind::Adt && type->name == cd->adt ? type : nullptr;
  std::map<Symbol, Type> inst;
  if (t) {
    const AdtDecl& ad = prog.adts.at(cd->adt);
    for (std::size_t i = 0; i < ad.params.size() && i < t->args.size(); ++i)
      inst[ad.params[i]] = t->args[i];
  }
  std::vector<Value> args;
  args.reserve(v->args.size());
  for (std::size_t i = 0; i < v->args.size(); ++i) {
    Type at;
    if (t) {
      Type full = substitute_params(cd->args[i], inst);
      if (!type_has_params(full)) at = erase_type(full);
    }
    args.push_back(to_smt_value(prog, v->args[i], at));
  }
  return mk_smt(SmtOp::Ctor, std::move(args), v->sym, t);
}

namespace detail {

void Evaluator::fail(const Expr& at, const char* rule, const std::string& msg) const {
  throw RuntimeError(rule, msg, at.span);
}

const Value* Evaluator::lookup(Symbol x) const {
  for (std::size_t i = locals_.size(); i-- > base_;)
    if (locals_[i].first == x) return &locals_[i].second;
  if (base_ == 0 && theta_) return theta_->find(x);
  return nullptr;
}

bool Evaluator::ground(const Expr& e) const {
  std::vector<Symbol> fv;
  free_vars(e, fv);
  for (Symbol x : fv)
    if (!lookup(x)) return false;
  return true;
}

bool Evaluator::match(const Pattern& p, const Value& v) {
  switch (p.kind) {
    case Pattern::Kind::Wild: return true;
    case Pattern::Kind::Var: locals_.emplace_back(p.name, v); return true;
    case Pattern::Kind::Const: return term_equal(p.constant, v);
    case Pattern::Kind::Ctor:
      if (v->kind != TermKind::Ctor || v->sym != p.name || v->args.size() != p.args.size())
        return false;
      for (std::size_t i = 0; i < p.args.size(); ++i)
        if (!match(p.args[i], v->args[i])) return false;
      return true;
  }
  return false;
}

Value Evaluator::eval(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var: {
      if (const Value* v = lookup(e.name)) return *v;
      fail(e, "e-Var-E", "variable " + e.name.str() + " is unbound");
    }
    case ExprKind::Const: return e.constant;
    case ExprKind::Ctor: {
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval(*a));
      return mk_ctor(e.name, std::move(args));
    }
    case ExprKind::Call: return call(e);
    case ExprKind::RelQuery: return query(e);
    case ExprKind::Op: return op(e);
    case ExprKind::Match: {
      Value scrut = eval(*e.args[0]);
      for (const auto& c : e.cases) {
        std::size_t mark = locals_.size();
        if (match(c.pat, scrut)) {
          Value r = eval(*c.body);
          locals_.resize(mark);
          return r;
        }
        locals_.resize(mark);
      }
      fail(e, "e-Match-E", "no branch matches " + to_source(scrut));
    }
    case ExprKind::Let: {
      Value v = eval(*e.args[0]);
      std::size_t mark = locals_.size();
      locals_.emplace_back(e.name, std::move(v));
      Value r = eval(*e.args[1]);
      locals_.resize(mark);
      return r;
    }
    case ExprKind::If: {
      Value c = eval(*e.args[0]);
      if (c->kind != TermKind::Bool) fail(e, "e-If-E", "condition is not a boolean");
      return eval(*e.args[as_bool(c) ? 1 : 2]);
    }
    case ExprKind::Quote: return formula(*e.args[0]);
    case ExprKind::Smt: return formula(e);
    case ExprKind::Unquote: fail(e, "e-Quote", "unquote outside a formula");
  }
  fail(e, "e-Var-E", "unsupported expression");
}

Value Evaluator::formula(const Expr& f) {
  if (f.kind == ExprKind::Unquote) {
    try {
      return to_smt_value(prog_, eval(*f.args[0]), f.smt_index);
    } catch (RuntimeError& err) {
      if (err.span.line == 0) err.span = f.span;
      throw;
    }
  }
  if (f.kind != ExprKind::Smt) fail(f, "φ-Ctor", "expression where a formula was expected");
  if (f.smt_op == SmtOp::Var) return smt_var(eval(*f.args[0]), f.annot);
  std::vector<Value> args;
  args.reserve(f.args.size());
  for (const auto& a : f.args) args.push_back(formula(*a));
  Type t;
  switch (f.smt_op) {
    case SmtOp::Ctor:
    case SmtOp::Tester:
    case SmtOp::Getter:
    case SmtOp::Eq: t = f.smt_index; break;
    default: break;
  }
  return mk_smt(f.smt_op, std::move(args), f.name, t, f.index);
}

Value Evaluator::call(const Expr& e) {
  const FunDecl* fd = prog_.fun(e.name);
  if (!fd || !fd->body) fail(e, "e-Fun-E", "function " + e.name.str() + " has no body");
  if (depth_ >= max_depth_)
    fail(e, "call-depth", "call depth limit (" + std::to_string(max_depth_) + ") exceeded in " +
                              e.name.str());
  std::vector<Value> args;
  args.reserve(e.args.size());
  for (const auto& a : e.args) args.push_back(eval(*a));
  std::size_t saved_base = base_, mark = locals_.size();
  base_ = mark;
  for (std::size_t i = 0; i < fd->params.size() && i < args.size(); ++i)
    locals_.emplace_back(fd->params[i], std::move(args[i]));
  ++depth_;
  struct Restore {
    Evaluator& ev;
    std::size_t base, mark;
    ~Restore() {
      --ev.depth_;
      ev.locals_.resize(mark);
      ev.base_ = base;
    }
  } restore{*this, saved_base, mark};
  return eval(*fd->body);
}

namespace {

std::uint64_t width_mask(int w) { return w >= 64 ? ~0ull : ((1ull << w) - 1); }

}  // namespace

Value Evaluator::op(const Expr& e) {
  const BuiltinOp o = e.op;
  // Short-circuiting connectives.
  if (o == BuiltinOp::And || o == BuiltinOp::Or) {
    Value a = eval(*e.args[0]);
    if (as_bool(a) == (o == BuiltinOp::Or)) return a;
    return eval(*e.args[1]);
  }
  std::vector<Value> v;
  v.reserve(e.args.size());
  for (const auto& a : e.args) v.push_back(eval(*a));
  switch (o) {
    case BuiltinOp::Not: return mk_bool(!as_bool(v[0]));
    case BuiltinOp::Eq: return mk_bool(term_equal(v[0], v[1]));
    case BuiltinOp::Ne: return mk_bool(!term_equal(v[0], v[1]));
    case BuiltinOp::Concat: return mk_string(v[0]->str + v[1]->str);
    case BuiltinOp::ToString:
      return mk_string(v[0]->kind == TermKind::String ? v[0]->str : to_source(v[0]));
    case BuiltinOp::Neg: return mk_bv(v[0]->width, (~v[0]->bits + 1) & width_mask(v[0]->width));
    case BuiltinOp::Add: return mk_bv(v[0]->width, v[0]->bits + v[1]->bits);
    case BuiltinOp::Sub: return mk_bv(v[0]->width, v[0]->bits - v[1]->bits);
    case BuiltinOp::Mul: return mk_bv(v[0]->width, v[0]->bits * v[1]->bits);
    case BuiltinOp::Div:
    case BuiltinOp::Rem: {
      int w = v[0]->width;
      std::int64_t a = bv_signed(v[0]), b = bv_signed(v[1]);
      if (b == 0) fail(e, "op-domain", std::string(o == BuiltinOp::Div ? "division" : "remainder") + " by zero");
      std::int64_t lo = w == 32 ? std::numeric_limits<std::int32_t>::min()
                                : std::numeric_limits<std::int64_t>::min();
      if (a == lo && b == -1)  // the one overflowing case wraps
        return o == BuiltinOp::Div ? mk_bv(w, static_cast<std::uint64_t>(a)) : mk_bv(w, 0);
      std::int64_t r = o == BuiltinOp::Div ? a / b : a % b;
      return mk_bv(w, static_cast<std::uint64_t>(r));
    }
    case BuiltinOp::Lt: return mk_bool(bv_signed(v[0]) < bv_signed(v[1]));
    case BuiltinOp::Le: return mk_bool(bv_signed(v[0]) <= bv_signed(v[1]));
    case BuiltinOp::Gt: return mk_bool(bv_signed(v[0]) > bv_signed(v[1]));
    case BuiltinOp::Ge: return mk_bool(bv_signed(v[0]) >= bv_signed(v[1]));
    case BuiltinOp::IsSat:
    case BuiltinOp::IsValid:
    case BuiltinOp::IsSatOpt:
    case BuiltinOp::GetModel:
    case BuiltinOp::QueryModel: return smt_op(e, v);
    default: break;
  }
  fail(e, "e-Op", std::string("unsupported operator ") + builtin_name(o));
}

Value Evaluator::smt_op(const Expr& e, const std::vector<Value>& v) {
  if (e.op == BuiltinOp::QueryModel) return smt_query_model(v[0], v[1]);
  if (!smt_)
    fail(e, "smt-unavailable", std::string(builtin_name(e.op)) + " needs an SMT backend");
  try {
    switch (e.op) {
      case BuiltinOp::IsSat: return mk_bool(smt_is_sat(*smt_, v[0]));
      case BuiltinOp::IsValid: return mk_bool(smt_is_valid(*smt_, v[0]));
      case BuiltinOp::IsSatOpt: return smt_is_sat_opt(*smt_, v[0], v[1]);
      default: return smt_get_model(*smt_, v[0], v[1]);
    }
  } catch (RuntimeError& err) {
    if (err.span.line == 0) err.span = e.span;
    throw;
  }
}

Value Evaluator::query(const Expr& e) {
  const RelDecl* rd = prog_.rel(e.name);
  const Relation* r = world_.find(e.name);
  const std::size_t n = e.args.size();
  Tuple key(n);
  std::uint32_t mask = 0;
  bool projecting = false, all_given = true;
  for (std::size_t i = 0; i < n; ++i) {
    switch (e.query[i]) {
      case QueryArg::Expr:
        key[i] = eval(*e.args[i]);
        mask |= 1u << i;
        break;
      case QueryArg::Wildcard: projecting = true; all_given = false; break;
      case QueryArg::Ignore: all_given = false; break;
    }
  }
  (void)rd;
  if (all_given) return mk_bool(r && r->contains(key));

  std::vector<Value> found;
  auto visit = [&](const Tuple& row) {
    for (std::size_t i = 0; i < n; ++i)
      if ((mask & (1u << i)) && !term_equal(row[i], key[i])) return false;
    if (!projecting) return true;
    std::vector<Value> proj;
    for (std::size_t i = 0; i < n; ++i)
      if (e.query[i] == QueryArg::Wildcard) proj.push_back(row[i]);
    found.push_back(mk_tuple(std::move(proj)));
    return false;
  };
  if (r) {
    for (const auto& row : r->rows())
      if (visit(row)) return mk_bool(true);
  }
  if (!projecting) return mk_bool(false);
  std::sort(found.begin(), found.end(), TermLess());
  return mk_list(found);
}

Term Evaluator::pattern_term(const Expr& e, bool in_formula) {
  if (ground(e)) return in_formula ? formula(e) : eval(e);
  if (!in_formula) {
    switch (e.kind) {
      case ExprKind::Var: return mk_var(e.name);
      case ExprKind::Ctor: {
        std::vector<Term> args;
        for (const auto& a : e.args) args.push_back(pattern_term(*a, false));
        return mk_ctor(e.name, std::move(args));
      }
      case ExprKind::Quote: return pattern_term(*e.args[0], true);
      case ExprKind::Smt: return pattern_term(e, true);
      default: fail(e, "e-Var-E", "expression with unbound variables cannot be evaluated");
    }
  }
  if (e.kind == ExprKind::Unquote) {
    if (e.args[0]->kind == ExprKind::Var) return mk_var(e.args[0]->name);
    fail(e, "e-Var-E", "unquoted expression with unbound variables");
  }
  if (e.kind != ExprKind::Smt) fail(e, "φ-Ctor", "expression where a formula was expected");
  if (e.smt_op == SmtOp::Var)
    return mk_smt(SmtOp::Var, {pattern_term(*e.args[0], false)}, Symbol(), e.annot);
  std::vector<Term> args;
  for (const auto& a : e.args) args.push_back(pattern_term(*a, true));
  Type t;
  switch (e.smt_op) {
    case SmtOp::Ctor:
    case SmtOp::Tester:
    case SmtOp::Getter:
    case SmtOp::Eq: t = e.smt_index; break;
    default: break;
  }
  return mk_smt(e.smt_op, std::move(args), e.name, t, e.index);
}

}  // namespace detail
}  // namespace flg
