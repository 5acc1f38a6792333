#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "flg/typecheck.hpp"

namespace flg {
namespace {

using Env = std::vector<std::pair<Symbol, Type>>;

struct FType {
  bool sym = false;
  Type t;  // erased pre-type
};

const Type* lookup(const Env& env, Symbol x) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == x) return &it->second;
  return nullptr;
}

std::string describe_var(Symbol x) {
  return x.str()[0] == '%' ? std::string("a generated variable") : "variable " + x.str();
}

class Checker {
 public:
  Checker(const Program& p, Diagnostics& d) : p_(p), d_(d) {}

  // ---- entry points ----------------------------------------------------------

  void declarations() {
    for (const auto& [name, adt] : p_.adts) {
      if (adt.builtin || adt.uninterpreted_sort) continue;
      for (Symbol a : adt.params) {
        bool used = false;
        for (Symbol c : adt.ctors)
          for (const Type& t : p_.ctors.at(c).args) used |= type_mentions_param(t, a);
        if (!used)
          d_.error(adt.span, "Delta-WF",
                   "type parameter " + a.str() + " of " + name.str() +
                       " does not occur in any constructor");
      }
    }
    for (const auto& [name, uf] : p_.ufs) {
      auto check = [&](const Type& t) {
        std::string rule = type_well_formed(p_, t, Mode::Smt);
        if (!rule.empty())
          d_.error(uf.span, "Φ-UFun",
                   "uninterpreted function " + name.str() + " uses type " + type_to_string(t) +
                       ", which is not SMT-representable");
      };
      for (const auto& t : uf.args) check(t);
      check(uf.ret);
    }
    for (Symbol r : p_.rel_order) {
      const RelDecl& rd = p_.rels.at(r);
      for (const auto& t : rd.types) {
        std::string rule = type_well_formed(p_, t, Mode::Exp);
        if (!rule.empty())
          d_.error(rd.span, "Φ-Rel", "relation " + r.str() + " has ill-formed column type " +
                                         type_to_string(t) + " (" + rule + ")");
      }
    }
  }

  void function(FunDecl& f) {
    guard([&] {
      tvars_ = f.type_params;
      current_ = &f;
      cur_params_.clear();
      Env env;
      for (std::size_t i = 0; i < f.params.size(); ++i) {
        Type t = f.param_types[i] ? f.param_types[i] : fresh();
        cur_params_.push_back(t);
        env.emplace_back(f.params[i], t);
      }
      cur_ret_ = f.ret ? f.ret : fresh();
      Type got = infer(*f.body, env);
      if (!unify(got, cur_ret_))
        fail(f.body->span, "F-WF",
             "body of " + f.name.str() + " has type " + show(got) +
                 ", but the declared return type is " + show(cur_ret_));
      if (f.lifted) generalize(f);
      finish();
    });
    current_ = nullptr;
    tvars_.clear();
    reset();
  }

  void clause(Clause& c) {
    guard([&] {
      const RelDecl& rd = p_.rels.at(c.head);
      if (rd.input && !c.fact)
        fail(c.span, "H-Clause",
             "input relation " + c.head.str() + " can only be given by facts, not derived by rules");
      Env env;
      for (auto& pr : c.body) premise(pr, env);
      for (std::size_t i = 0; i < c.head_vars.size(); ++i) {
        Symbol x = c.head_vars[i];
        const Type* t = lookup(env, x);
        if (!t)
          fail(c.span, "H-Clause",
               "range restriction violated: head variable " + x.str() + " of " + c.head.str() +
                   " is not bound by the body");
        if (!unify(*t, rd.types[i]))
          fail(c.span, "H-Clause",
               "argument " + std::to_string(i + 1) + " of " + c.head.str() + " has type " +
                   show(*t) + ", expected " + type_to_string(rd.types[i]));
      }
      finish();
      for (auto& [x, t] : env) t = zonk(t);
    });
    reset();
  }

  bool closed(Expr& e, const Type& expected) {
    bool ok = true;
    guard([&] {
      Env env;
      Type got = infer(e, env);
      if (!unify(got, expected))
        fail(e.span, "e-Const", "value has type " + show(got) + ", expected " + type_to_string(expected));
      finish();
    }, &ok);
    reset();
    return ok;
  }

 private:
  // ---- errors ----------------------------------------------------------------

  [[noreturn]] void fail(const SourceSpan& at, const std::string& rule, const std::string& msg) {
    throw DiagnosticError({Severity::Error, at, frame_.empty() ? rule : frame_, msg});
  }

  template <class F>
  void guard(F&& f, bool* ok = nullptr) {
    try {
      f();
    } catch (const DiagnosticError& e) {
      d_.add(e.diag);
      if (ok) *ok = false;
    }
  }

  // The outermost application being checked names the rule that failed.
  struct Frame {
    Checker& c;
    bool owner;
    Frame(Checker& ch, const char* rule) : c(ch), owner(ch.frame_.empty()) {
      if (owner) c.frame_ = rule;
    }
    ~Frame() {
      if (owner) c.frame_.clear();
    }
  };

  void reset() {
    metas_.clear();
    pre_only_.clear();
    numeric_.clear();
    smt_wf_.clear();
    visited_.clear();
    matches_.clear();
    frame_.clear();
    pattern_env_ = nullptr;
  }

  // ---- metas -----------------------------------------------------------------

  Type fresh(bool pre = false) {
    int id = static_cast<int>(metas_.size());
    metas_.push_back(nullptr);
    pre_only_.push_back(pre);
    return t_meta(id);
  }

  Type resolve(Type t) const {
    while (t->kind == TypeKind::Meta && metas_[t->meta]) t = metas_[t->meta];
    return t;
  }

  Type zonk(const Type& t) const {
    Type r = resolve(t);
    if (r->args.empty()) return r;
    std::vector<Type> args;
    bool changed = false;
    for (const auto& a : r->args) {
      args.push_back(zonk(a));
      changed |= args.back() != a;
    }
    if (!changed) return r;
    switch (r->kind) {
      case TypeKind::Smt: return t_smt(args[0]);
      case TypeKind::Sym: return t_sym(args[0]);
      default: return t_adt(r->name, std::move(args));
    }
  }

  std::string show(const Type& t) const { return type_to_string(zonk(t)); }

  bool occurs(int id, const Type& t) const {
    Type r = resolve(t);
    if (r->kind == TypeKind::Meta) return r->meta == id;
    for (const auto& a : r->args)
      if (occurs(id, a)) return true;
    return false;
  }

  bool bind(int id, const Type& t) {
    if (occurs(id, t)) return false;
    if (pre_only_[id]) {
      if (!is_pre_type(t)) return false;
      if (t->kind == TypeKind::Meta) pre_only_[t->meta] = true;
    }
    metas_[id] = t;
    return true;
  }

  bool unify(const Type& x, const Type& y) {
    Type a = resolve(x), b = resolve(y);
    if (a == b) return true;
    if (a->kind == TypeKind::Meta) {
      if (b->kind == TypeKind::Meta && a->meta == b->meta) return true;
      return bind(a->meta, b);
    }
    if (b->kind == TypeKind::Meta) return bind(b->meta, a);
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case TypeKind::BitVec: return a->width == b->width;
      case TypeKind::Param: return a->name == b->name;
      case TypeKind::Adt:
        if (a->name != b->name || a->args.size() != b->args.size()) return false;
        for (std::size_t i = 0; i < a->args.size(); ++i)
          if (!unify(a->args[i], b->args[i])) return false;
        return true;
      case TypeKind::Smt:
      case TypeKind::Sym: return unify(a->args[0], b->args[0]);
      default: return true;
    }
  }

  // A meta standing for a pre-type inside smt/sym.
  Type pre(const Type& t) {
    Type r = resolve(t);
    if (r->kind == TypeKind::Meta) pre_only_[r->meta] = true;
    return r;
  }
  Type smt_of(const Type& t) { return t_smt(pre(t)); }
  Type sym_of(const Type& t) { return t_sym(pre(t)); }

  // erase, leaving unresolved metas in place (they are pre-types by fiat).
  Type erase_m(const Type& t) {
    Type r = resolve(t);
    switch (r->kind) {
      case TypeKind::Smt:
      case TypeKind::Sym: return erase_m(r->args[0]);
      case TypeKind::Meta: return pre(r);
      case TypeKind::Adt: {
        std::vector<Type> args;
        for (const auto& a : r->args) args.push_back(erase_m(a));
        return t_adt(r->name, std::move(args));
      }
      default: return r;
    }
  }

  // Fresh instantiation of a data type's parameters.
  std::map<Symbol, Type> instantiate(const std::vector<Symbol>& params) {
    std::map<Symbol, Type> m;
    for (Symbol a : params) m[a] = fresh();
    return m;
  }
  static Type adt_type(const AdtDecl& a, const std::map<Symbol, Type>& inst) {
    std::vector<Type> args;
    for (Symbol p : a.params) args.push_back(inst.at(p));
    return t_adt(a.name, std::move(args));
  }

  // Checking positions admit sym t where smt t is wanted: a quoted variable
  // may always be read as a formula. Data types are covariant (immutable).
  bool subsume(const Type& x, const Type& y) {
    Type a = resolve(x), b = resolve(y);
    if (a->kind == TypeKind::Sym && b->kind == TypeKind::Smt) return unify(a->args[0], b->args[0]);
    if (a->kind == TypeKind::Adt && b->kind == TypeKind::Adt && a->name == b->name &&
        a->args.size() == b->args.size()) {
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!subsume(a->args[i], b->args[i])) return false;
      return true;
    }
    return unify(a, b);
  }

  void expect(const Type& got, const Type& want, const SourceSpan& at, const std::string& rule,
              const std::string& what) {
    if (!subsume(got, want))
      fail(at, rule, what + " has type " + show(got) + ", expected " + show(want));
  }

  void numeric(const Type& t, const SourceSpan& at, Expr* bv_const = nullptr) {
    Type r = resolve(t);
    if (r->kind == TypeKind::Meta) {
      numeric_.push_back({t, at, bv_const});
      return;
    }
    if (r->kind != TypeKind::BitVec)
      fail(at, "e-Op", "operator expects bv[32] or bv[64], got " + show(t));
    if (bv_const) bv_const->index = r->width;
  }

  // ---- expressions -------------------------------------------------------------

  Type infer(Expr& e, Env& env) {
    visited_.push_back(&e);
    if (pattern_env_ && e.kind != ExprKind::Var && e.kind != ExprKind::Const &&
        e.kind != ExprKind::Ctor && e.kind != ExprKind::Quote && e.kind != ExprKind::Smt) {
      require_bound(e, env);
      Env* saved = pattern_env_;
      pattern_env_ = nullptr;
      Type t = infer_(e, env);
      pattern_env_ = saved;
      return e.type = t;
    }
    Type t = infer_(e, env);
    e.type = t;
    return t;
  }

  void require_bound(const Expr& e, const Env& env) {
    std::vector<Symbol> fv;
    free_vars(e, fv);
    for (Symbol x : fv)
      if (!lookup(env, x))
        fail(e.span, "e-Var",
             describe_var(x) + " is not bound here; only constructors can bind variables on "
                               "the right-hand side of an equation");
  }

  Type check(Expr& e, const Type& want, Env& env, const std::string& rule, const std::string& what) {
    Type got = infer(e, env);
    expect(got, want, e.span, rule, what);
    return got;
  }

  Type infer_(Expr& e, Env& env) {
    switch (e.kind) {
      case ExprKind::Var: {
        if (const Type* t = lookup(env, e.name)) return *t;
        if (pattern_env_) {
          Type t = fresh();
          env.emplace_back(e.name, t);
          return t;
        }
        fail(e.span, "e-Var", describe_var(e.name) + " is unbound");
      }
      case ExprKind::Const: return typeof_constant(e.constant);
      case ExprKind::Ctor: {
        const CtorDecl& cd = p_.ctors.at(e.name);
        const AdtDecl& ad = p_.adts.at(cd.adt);
        auto inst = instantiate(ad.params);
        Frame fr(*this, "e-Ctor");
        for (std::size_t i = 0; i < e.args.size(); ++i)
          check(*e.args[i], substitute_params(cd.args[i], inst), env, "e-Ctor",
                "argument " + std::to_string(i + 1) + " of constructor " + ctor_label(e.name));
        return adt_type(ad, inst);
      }
      case ExprKind::Call: return call(e, env);
      case ExprKind::RelQuery: {
        const RelDecl& rd = p_.rels.at(e.name);
        Frame fr(*this, "e-Rel");
        std::vector<Type> out;
        for (std::size_t i = 0; i < e.args.size(); ++i) {
          switch (e.query[i]) {
            case QueryArg::Expr:
              check(*e.args[i], rd.types[i], env, "e-Rel",
                    "argument " + std::to_string(i + 1) + " of relation " + e.name.str());
              break;
            case QueryArg::Wildcard: out.push_back(rd.types[i]); break;
            case QueryArg::Ignore: break;
          }
        }
        if (out.empty()) return t_bool();
        if (out.size() == 1) return t_adt(names::list(), {out[0]});
        if (out.size() > 8) fail(e.span, "e-Rel", "at most 8 '?" "?' positions are supported");
        int n = static_cast<int>(out.size());
        return t_adt(names::list(), {t_adt(names::tuple(n), out)});
      }
      case ExprKind::Op: return op(e, env);
      case ExprKind::Match: {
        Type scrut = infer(*e.args[0], env);
        Type result = fresh();
        for (auto& c : e.cases) {
          std::size_t mark = env.size();
          pattern(c.pat, scrut, env);
          check(*c.body, result, env, "e-Match", "match branch");
          env.resize(mark);
        }
        matches_.push_back({&e, scrut});
        return result;
      }
      case ExprKind::Let: {
        Type t1 = infer(*e.args[0], env);
        env.emplace_back(e.name, t1);
        Type t2 = infer(*e.args[1], env);
        env.pop_back();
        return t2;
      }
      case ExprKind::If: {
        check(*e.args[0], t_bool(), env, "e-If", "condition");
        Type t = infer(*e.args[1], env);
        check(*e.args[2], t, env, "e-If", "else branch");
        return t;
      }
      case ExprKind::Quote: {
        std::string saved = frame_;
        frame_.clear();
        FType ft = formula(*e.args[0], env);
        frame_ = saved;
        return ft.sym ? sym_of(ft.t) : smt_of(ft.t);
      }
      case ExprKind::Smt: {
        FType ft = formula_node(e, env);
        return ft.sym ? sym_of(ft.t) : smt_of(ft.t);
      }
      case ExprKind::Unquote: fail(e.span, "e-Quote", "unquote outside a formula");
    }
    fail(e.span, "e-Var", "unsupported expression");
  }

  std::string ctor_label(Symbol c) const {
    if (names::is_record_ctor(c)) return "of record " + p_.ctors.at(c).adt.str();
    return c.str();
  }

  Type call(Expr& e, Env& env) {
    const FunDecl& fd = p_.funs.at(e.name);
    std::vector<Type> params;
    Type ret;
    if (&fd == current_) {
      params = cur_params_;  // monomorphic recursion
      ret = cur_ret_;
    } else {
      auto inst = instantiate(fd.type_params);
      for (const auto& t : fd.param_types) params.push_back(t ? substitute_params(t, inst) : fresh());
      ret = fd.ret ? substitute_params(fd.ret, inst) : fresh();
    }
    Frame fr(*this, "e-Fun");
    for (std::size_t i = 0; i < e.args.size(); ++i)
      check(*e.args[i], params[i], env, "e-Fun",
            (fd.getter ? "argument of field " : "argument " + std::to_string(i + 1) + " of ") +
                (fd.getter ? e.name.str() : e.name.str()));
    return ret;
  }

  Type op(Expr& e, Env& env) {
    Frame fr(*this, "e-Op");
    const std::string name = builtin_name(e.op);
    auto arg = [&](std::size_t i) { return "operand " + std::to_string(i + 1) + " of " + name; };
    switch (e.op) {
      case BuiltinOp::Add:
      case BuiltinOp::Sub:
      case BuiltinOp::Mul:
      case BuiltinOp::Div:
      case BuiltinOp::Rem: {
        Type t = infer(*e.args[0], env);
        check(*e.args[1], t, env, "e-Op", arg(1));
        numeric(t, e.span);
        return t;
      }
      case BuiltinOp::Neg: {
        Type t = infer(*e.args[0], env);
        numeric(t, e.span);
        return t;
      }
      case BuiltinOp::Lt:
      case BuiltinOp::Le:
      case BuiltinOp::Gt:
      case BuiltinOp::Ge: {
        Type t = infer(*e.args[0], env);
        check(*e.args[1], t, env, "e-Op", arg(1));
        numeric(t, e.span);
        return t_bool();
      }
      case BuiltinOp::Eq:
      case BuiltinOp::Ne: {
        Type t = infer(*e.args[0], env);
        check(*e.args[1], t, env, "e-Op", arg(1));
        return t_bool();
      }
      case BuiltinOp::And:
      case BuiltinOp::Or:
        check(*e.args[0], t_bool(), env, "e-Op", arg(0));
        check(*e.args[1], t_bool(), env, "e-Op", arg(1));
        return t_bool();
      case BuiltinOp::Not: check(*e.args[0], t_bool(), env, "e-Op", arg(0)); return t_bool();
      case BuiltinOp::Concat:
        check(*e.args[0], t_string(), env, "e-Op", arg(0));
        check(*e.args[1], t_string(), env, "e-Op", arg(1));
        return t_string();
      case BuiltinOp::ToString: infer(*e.args[0], env); return t_string();
      case BuiltinOp::IsSat:
      case BuiltinOp::IsValid:
        check(*e.args[0], t_smt(t_bool()), env, "e-Op", arg(0));
        return t_bool();
      case BuiltinOp::IsSatOpt:
      case BuiltinOp::GetModel:
        check(*e.args[0], t_adt(names::list(), {t_smt(t_bool())}), env, "e-Op", arg(0));
        check(*e.args[1], t_adt(names::option(), {t_bv(32)}), env, "e-Op", arg(1));
        return t_adt(names::option(), {e.op == BuiltinOp::IsSatOpt ? t_bool() : t_model()});
      case BuiltinOp::QueryModel: {
        Type a = fresh(true);
        check(*e.args[0], t_sym(a), env, "e-Op", arg(0));
        check(*e.args[1], t_model(), env, "e-Op", arg(1));
        return t_adt(names::option(), {a});
      }
    }
    fail(e.span, "e-Op", "unknown operator");
  }

  void pattern(Pattern& p, const Type& want, Env& env) {
    switch (p.kind) {
      case Pattern::Kind::Var: env.emplace_back(p.name, want); return;
      case Pattern::Kind::Wild: return;
      case Pattern::Kind::Const:
        if (!unify(typeof_constant(p.constant), want))
          fail(p.span, "e-Match", "pattern constant " + to_source(p.constant) +
                                      " does not have the scrutinee type " + show(want));
        return;
      case Pattern::Kind::Ctor: {
        const CtorDecl& cd = p_.ctors.at(p.name);
        const AdtDecl& ad = p_.adts.at(cd.adt);
        auto inst = instantiate(ad.params);
        Type t = adt_type(ad, inst);
        if (!unify(t, want))
          fail(p.span, "e-Match", "pattern " + ctor_label(p.name) + " has type " + show(t) +
                                      ", but the scrutinee has type " + show(want));
        for (std::size_t i = 0; i < p.args.size(); ++i)
          pattern(p.args[i], substitute_params(cd.args[i], inst), env);
        return;
      }
    }
  }

  // ---- formulas ------------------------------------------------------------------

  FType formula(Expr& f, Env& env) {
    visited_.push_back(&f);
    FType r;
    if (f.kind == ExprKind::Unquote) {
      Expr& inner = *f.args[0];
      Type tau = infer(inner, env);
      Type rt = resolve(tau);
      switch (rt->kind) {
        case TypeKind::Smt: r = {false, erase_m(rt->args[0])}; break;
        case TypeKind::Sym: r = {true, erase_m(rt->args[0])}; break;
        case TypeKind::Model: fail(f.span, "φ-Unquote", "a model cannot appear inside a formula");
        case TypeKind::Param:
          fail(f.span, "t-TVar", "a value of type " + show(rt) +
                                     " cannot appear inside a formula (type variables are not "
                                     "SMT-representable)");
        default: r = {false, erase_m(rt)}; break;
      }
      smt_wf_.push_back({tau, f.span});
      f.smt_index = r.t;
    } else if (f.kind == ExprKind::Smt) {
      r = formula_node(f, env);
    } else {
      fail(f.span, "φ-Ctor", "expression where a formula was expected");
    }
    f.type = r.sym ? sym_of(r.t) : smt_of(r.t);
    return r;
  }

  void check_formula(Expr& f, bool want_sym, const Type& t, Env& env, const std::string& what) {
    if (pattern_env_ && f.kind == ExprKind::Unquote && f.args[0]->kind == ExprKind::Var &&
        !lookup(env, f.args[0]->name)) {
      // A pattern variable takes whatever formula occupies its position.
      Type bt = want_sym ? sym_of(t) : smt_of(t);
      env.emplace_back(f.args[0]->name, bt);
      f.args[0]->type = bt;
      f.type = bt;
      f.smt_index = t;
      visited_.push_back(&f);
      visited_.push_back(f.args[0].get());
      return;
    }
    FType got = formula(f, env);
    if (want_sym && !got.sym)
      fail(f.span, "φ-Ctor", what + " must be an SMT variable of type " + show(t) +
                                  " sym, got a formula of type " + show(got.t) + " smt");
    if (!unify(got.t, t))
      fail(f.span, "φ-Ctor", what + " has type " + show(got.t) + (got.sym ? " sym" : " smt") +
                                  ", expected " + show(t) + (want_sym ? " sym" : " smt"));
  }

  // The declared argument kind for a constructor argument of type τ: toSMT(τ).
  std::pair<bool, Type> to_smt_arg(const Type& tau) {
    Type r = resolve(tau);
    if (r->kind == TypeKind::Sym) return {true, erase_m(r->args[0])};
    return {false, erase_m(r)};
  }

  Type adt_of_ctor(Symbol c, std::map<Symbol, Type>& inst) {
    const CtorDecl& cd = p_.ctors.at(c);
    const AdtDecl& ad = p_.adts.at(cd.adt);
    inst = instantiate(ad.params);
    for (auto& [_, t] : inst) pre(t);
    return adt_type(ad, inst);
  }

  FType formula_node(Expr& f, Env& env) {
    const Type b = t_bool();
    auto arg = [&](std::size_t i) {
      return "argument " + std::to_string(i + 1) + " of " + smt_op_name(f.smt_op);
    };
    switch (f.smt_op) {
      case SmtOp::Var: {
        Type t = f.annot;
        if (!is_pre_type(t))
          fail(f.span, "c-SMT-Var", "SMT variables must have a pre-type, not " + show(t));
        std::string rule = type_well_formed(p_, t, Mode::Smt, tvars_);
        if (!rule.empty())
          fail(f.span, "c-SMT-Var", "type " + show(t) + " of an SMT variable is not SMT-representable (" +
                                        rule + ")");
        f.annot = erase_type(t);
        infer(*f.args[0], env);
        return {true, f.annot};
      }
      case SmtOp::Ctor: {
        std::map<Symbol, Type> inst;
        Type d = adt_of_ctor(f.name, inst);
        const CtorDecl& cd = p_.ctors.at(f.name);
        for (std::size_t i = 0; i < f.args.size(); ++i) {
          auto [sym, t] = to_smt_arg(substitute_params(cd.args[i], inst));
          check_formula(*f.args[i], sym, t, env, "argument " + std::to_string(i + 1) + " of " + ctor_label(f.name));
        }
        smt_wf_.push_back({d, f.span});
        f.smt_index = d;
        return {false, d};
      }
      case SmtOp::Uf: {
        const UfDecl& u = p_.ufs.at(f.name);
        for (std::size_t i = 0; i < f.args.size(); ++i)
          check_formula(*f.args[i], false, u.args[i], env, "argument " + std::to_string(i + 1) + " of " + f.name.str());
        return {false, u.ret};
      }
      case SmtOp::Not: check_formula(*f.args[0], false, b, env, arg(0)); return {false, b};
      case SmtOp::And:
      case SmtOp::Or:
      case SmtOp::Imp:
      case SmtOp::Iff:
        check_formula(*f.args[0], false, b, env, arg(0));
        check_formula(*f.args[1], false, b, env, arg(1));
        return {false, b};
      case SmtOp::Eq: {
        Type t = f.annot ? erase_type(f.annot) : fresh(true);
        check_formula(*f.args[0], false, t, env, arg(0));
        check_formula(*f.args[1], false, t, env, arg(1));
        smt_wf_.push_back({t, f.span});
        f.smt_index = t;
        return {false, b};
      }
      case SmtOp::Ite: {
        Type t = fresh(true);
        check_formula(*f.args[0], false, b, env, arg(0));
        check_formula(*f.args[1], false, t, env, arg(1));
        check_formula(*f.args[2], false, t, env, arg(2));
        return {false, t};
      }
      case SmtOp::Let: {
        Type t1 = fresh(true), t2 = fresh(true);
        check_formula(*f.args[0], true, t1, env, arg(0));
        check_formula(*f.args[1], false, t1, env, arg(1));
        check_formula(*f.args[2], false, t2, env, arg(2));
        return {false, t2};
      }
      case SmtOp::Forall:
      case SmtOp::Exists: {
        std::size_t n = static_cast<std::size_t>(f.index);
        for (std::size_t i = 0; i < n; ++i)
          check_formula(*f.args[i], true, fresh(true), env, "bound variable " + std::to_string(i + 1));
        check_formula(*f.args[n], false, b, env, "quantifier body");
        for (std::size_t i = n + 1; i < f.args.size(); ++i) formula(*f.args[i], env);
        return {false, b};
      }
      case SmtOp::Tester:
      case SmtOp::Getter: {
        std::map<Symbol, Type> inst;
        Type d = adt_of_ctor(f.name, inst);
        check_formula(*f.args[0], false, d, env, arg(0));
        smt_wf_.push_back({d, f.span});
        f.smt_index = d;
        if (f.smt_op == SmtOp::Tester) return {false, b};
        const CtorDecl& cd = p_.ctors.at(f.name);
        return {false, erase_m(substitute_params(cd.args[f.index - 1], inst))};
      }
      case SmtOp::BvConst: {
        check_formula(*f.args[0], false, t_bv(32), env, arg(0));
        if (f.index == 32 || f.index == 64) return {false, t_bv(f.index)};
        Type t = fresh(true);
        numeric(t, f.span, &f);
        return {false, t};
      }
      case SmtOp::BvNeg:
      case SmtOp::BvNot: {
        Type t = fresh(true);
        check_formula(*f.args[0], false, t, env, arg(0));
        numeric(t, f.span);
        return {false, t};
      }
      case SmtOp::Const: break;
      default: {
        Type t = fresh(true);
        check_formula(*f.args[0], false, t, env, arg(0));
        check_formula(*f.args[1], false, t, env, arg(1));
        numeric(t, f.span);
        bool cmp = f.smt_op >= SmtOp::BvSlt;
        return {false, cmp ? b : t};
      }
    }
    fail(f.span, "φ-Ctor", "unsupported formula constructor");
  }

  // ---- clauses -------------------------------------------------------------------

  void bind_var(Symbol x, const Type& t, Env& env, const SourceSpan& at, const std::string& rule,
                const std::string& where) {
    if (const Type* have = lookup(env, x)) {
      if (!unify(*have, t))
        fail(at, rule, describe_var(x) + " has type " + show(*have) + ", but " + where +
                           " has type " + show(t));
      return;
    }
    env.emplace_back(x, t);
  }

  void premise(Premise& pr, Env& env) {
    switch (pr.kind) {
      case PremiseKind::PosAtom: {
        const RelDecl& rd = p_.rels.at(pr.rel);
        for (std::size_t i = 0; i < pr.vars.size(); ++i)
          bind_var(pr.vars[i], rd.types[i], env, pr.span, "P-PosAtom",
                   "column " + std::to_string(i + 1) + " of " + pr.rel.str());
        return;
      }
      case PremiseKind::NegAtom: {
        const RelDecl& rd = p_.rels.at(pr.rel);
        for (std::size_t i = 0; i < pr.vars.size(); ++i) {
          if (!lookup(env, pr.vars[i]))
            fail(pr.span, "P-NegAtom", describe_var(pr.vars[i]) +
                                           " must be bound before the negated atom " + pr.rel.str());
          bind_var(pr.vars[i], rd.types[i], env, pr.span, "P-NegAtom",
                   "column " + std::to_string(i + 1) + " of " + pr.rel.str());
        }
        return;
      }
      case PremiseKind::Eq: {
        if (ground(*pr.expr, env)) {
          Type t = infer(*pr.expr, env);
          bind_var(pr.var, t, env, pr.span, "P-Eq-FB", "the right-hand side");
          return;
        }
        const Type* yt = lookup(env, pr.var);
        if (!yt) {
          std::string rule = pr.expr->kind == ExprKind::Ctor    ? "P-EqCtor-BF"
                             : pr.expr->kind == ExprKind::Quote ? "P-EqSMT-BF"
                                                                : "P-Eq-FB";
          std::vector<Symbol> fv;
          free_vars(*pr.expr, fv);
          std::string names;
          for (Symbol x : fv)
            if (!lookup(env, x) && x.str()[0] != '%') names += (names.empty() ? "" : ", ") + x.str();
          fail(pr.span, rule,
               "both sides of the equation contain unbound variables" +
                   (names.empty() ? std::string() : " (" + names + ")"));
        }
        Type want = *yt;
        pattern_env_ = &env;
        unif_pattern(*pr.expr, want, env);
        pattern_env_ = nullptr;
        return;
      }
      case PremiseKind::NegEq: {
        const Type* yt = lookup(env, pr.var);
        if (!yt) fail(pr.span, "P-NegEq", describe_var(pr.var) + " must be bound before the disequation");
        Type want = *yt;
        require_bound(*pr.expr, env);
        Type t = infer(*pr.expr, env);
        expect(t, want, pr.span, "P-NegEq", "the right-hand side");
        return;
      }
    }
  }

  bool ground(const Expr& e, const Env& env) const {
    std::vector<Symbol> fv;
    free_vars(e, fv);
    for (Symbol x : fv)
      if (!lookup(env, x)) return false;
    return true;
  }

  // Right-hand side of Y = e where Y is bound and e binds variables.
  void unif_pattern(Expr& e, const Type& want, Env& env) {
    switch (e.kind) {
      case ExprKind::Var:
      case ExprKind::Const:
      case ExprKind::Ctor: {
        visited_.push_back(&e);
        Type got = infer_(e, env);
        e.type = got;
        std::string rule = e.kind == ExprKind::Var ? "Xτ-Check" : "P-EqCtor-BF";
        expect(got, want, e.span, rule, e.kind == ExprKind::Var ? describe_var(e.name) : "pattern");
        return;
      }
      case ExprKind::Quote:
      case ExprKind::Smt: {
        Expr& f = e.kind == ExprKind::Quote ? *e.args[0] : e;
        Type r = resolve(want);
        if (r->kind == TypeKind::Meta) {
          Type t = fresh(true);
          unify(r, t_smt(t));
          r = resolve(want);
        }
        if (r->kind != TypeKind::Smt && r->kind != TypeKind::Sym)
          fail(e.span, "P-EqSMT-BF", "a formula pattern cannot match a value of type " + show(r));
        if (e.kind == ExprKind::Quote) {
          visited_.push_back(&e);
          e.type = r;
        }
        check_formula(f, r->kind == TypeKind::Sym, erase_m(r->args[0]), env, "pattern");
        return;
      }
      default: {
        Type got = infer(e, env);
        expect(got, want, e.span, "P-Eq-FB", "the right-hand side");
      }
    }
  }

  // ---- finishing a unit -----------------------------------------------------------

  void generalize(FunDecl& f) {
    settle_numeric();
    std::vector<Type> sig = cur_params_;
    sig.push_back(cur_ret_);
    int k = 0;
    std::function<void(const Type&)> gen = [&](const Type& t) {
      Type r = resolve(t);
      if (r->kind == TypeKind::Meta) {
        Symbol a("'_" + std::to_string(k++));
        metas_[r->meta] = t_param(a);
        f.type_params.push_back(a);
        return;
      }
      for (const auto& x : r->args) gen(x);
    };
    for (const auto& t : sig) gen(t);
    for (std::size_t i = 0; i < f.params.size(); ++i) f.param_types[i] = zonk(cur_params_[i]);
    f.ret = zonk(cur_ret_);
    tvars_ = f.type_params;
  }

  void settle_numeric() {
    for (auto& n : numeric_) {
      Type r = resolve(n.t);
      if (r->kind == TypeKind::Meta) bind(r->meta, t_bv(32));  // default width
      r = resolve(n.t);
      if (r->kind != TypeKind::BitVec)
        fail(n.at, "e-Op", "operator expects bv[32] or bv[64], got " + show(r));
      if (n.bv_const) n.bv_const->index = r->width;
    }
    numeric_.clear();
  }

  void finish() {
    settle_numeric();
    for (auto& [t, at] : smt_wf_) {
      Type z = zonk(t);
      if (type_has_metas(z))
        fail(at, "c-SMT-Ctor", "cannot determine the SMT sort " + type_to_string(z) +
                                   "; add a type annotation");
      std::string rule = type_well_formed(p_, z, Mode::Smt, tvars_);
      if (!rule.empty())
        fail(at, rule, "type " + type_to_string(z) + " is not SMT-representable");
    }
    for (Expr* e : visited_) {
      if (e->type) e->type = zonk(e->type);
      if (e->smt_index) e->smt_index = zonk(e->smt_index);
    }
    for (auto& [m, t] : matches_) exhaustive(*m, zonk(t));
  }

  // ---- exhaustiveness -------------------------------------------------------------

  static const Pattern* wild() {
    static const Pattern w;
    return &w;
  }

  using Row = std::vector<const Pattern*>;

  std::vector<Type> ctor_arg_types(Symbol c, const Type& t) const {
    const CtorDecl& cd = p_.ctors.at(c);
    const AdtDecl& ad = p_.adts.at(cd.adt);
    std::map<Symbol, Type> inst;
    for (std::size_t i = 0; i < ad.params.size(); ++i)
      inst[ad.params[i]] = i < t->args.size() ? t->args[i] : t_bool();
    std::vector<Type> out;
    for (const auto& a : cd.args) out.push_back(substitute_params(a, inst));
    return out;
  }

  // Is some value vector of these types matched by no row?
  bool useful(const std::vector<Row>& rows, const std::vector<Type>& tys, int depth = 0) const {
    if (tys.empty()) return rows.empty();
    if (rows.empty()) return true;
    if (depth > 64) return false;  // give up quietly on pathological nests
    const Type& t = tys[0];
    std::vector<Type> rest(tys.begin() + 1, tys.end());
    auto is_wild = [](const Pattern* p) {
      return p->kind == Pattern::Kind::Var || p->kind == Pattern::Kind::Wild;
    };
    if (t->kind == TypeKind::Adt) {
      const AdtDecl* ad = p_.adt(t->name);
      std::set<Symbol> heads;
      for (const auto& r : rows)
        if (r[0]->kind == Pattern::Kind::Ctor) heads.insert(r[0]->name);
      if (ad && !ad->ctors.empty() && heads.size() == ad->ctors.size()) {
        for (Symbol c : ad->ctors) {
          std::vector<Type> args = ctor_arg_types(c, t);
          std::vector<Row> spec;
          for (const auto& r : rows) {
            Row nr;
            if (is_wild(r[0])) {
              nr.assign(args.size(), wild());
            } else if (r[0]->kind == Pattern::Kind::Ctor && r[0]->name == c) {
              for (const auto& a : r[0]->args) nr.push_back(&a);
            } else {
              continue;
            }
            nr.insert(nr.end(), r.begin() + 1, r.end());
            spec.push_back(std::move(nr));
          }
          std::vector<Type> sub = args;
          sub.insert(sub.end(), rest.begin(), rest.end());
          if (useful(spec, sub, depth + 1)) return true;
        }
        return false;
      }
    } else if (t->kind == TypeKind::Bool) {
      bool seen[2] = {false, false};
      for (const auto& r : rows)
        if (r[0]->kind == Pattern::Kind::Const) seen[as_bool(r[0]->constant)] = true;
      if (seen[0] && seen[1]) {
        for (int v = 0; v < 2; ++v) {
          std::vector<Row> spec;
          for (const auto& r : rows)
            if (is_wild(r[0]) || as_bool(r[0]->constant) == (v == 1))
              spec.emplace_back(r.begin() + 1, r.end());
          if (useful(spec, rest, depth + 1)) return true;
        }
        return false;
      }
    }
    std::vector<Row> def;
    for (const auto& r : rows)
      if (is_wild(r[0])) def.emplace_back(r.begin() + 1, r.end());
    return useful(def, rest, depth + 1);
  }

  void exhaustive(const Expr& m, const Type& scrut) {
    std::vector<Row> rows;
    for (const auto& c : m.cases) rows.push_back({&c.pat});
    if (useful(rows, {scrut}))
      d_.warning(m.span, "e-Match", "match over " + type_to_string(scrut) + " is not exhaustive");
  }

  struct Numeric {
    Type t;
    SourceSpan at;
    Expr* bv_const;
  };

  const Program& p_;
  Diagnostics& d_;
  std::vector<Type> metas_;
  std::vector<bool> pre_only_;
  std::vector<Numeric> numeric_;
  std::vector<std::pair<Type, SourceSpan>> smt_wf_;
  std::vector<Expr*> visited_;
  std::vector<std::pair<Expr*, Type>> matches_;
  std::vector<Symbol> tvars_;
  std::string frame_;
  Env* pattern_env_ = nullptr;
  const FunDecl* current_ = nullptr;
  std::vector<Type> cur_params_;
  Type cur_ret_;
};

}  // namespace

std::string type_well_formed(const Program& prog, const Type& t, Mode m,
                             const std::vector<Symbol>& tvars) {
  switch (t->kind) {
    case TypeKind::Bool:
    case TypeKind::String:
    case TypeKind::BitVec: return "";
    case TypeKind::Model: return m == Mode::Exp ? "" : "τ-Model";
    case TypeKind::Param:
      if (m == Mode::Smt) return "t-TVar";
      return std::find(tvars.begin(), tvars.end(), t->name) != tvars.end() ? "" : "t-TVar";
    case TypeKind::Adt: {
      const AdtDecl* a = prog.adt(t->name);
      if (!a || a->params.size() != t->args.size()) return "t-ADT";
      for (const auto& x : t->args) {
        std::string r = type_well_formed(prog, x, m, tvars);
        if (!r.empty()) return r;
      }
      return "";
    }
    case TypeKind::Smt:
    case TypeKind::Sym: {
      if (!is_pre_type(t->args[0])) return t->kind == TypeKind::Smt ? "τ-SMT" : "τ-Sym";
      return type_well_formed(prog, t->args[0], Mode::Smt, tvars);
    }
    case TypeKind::Meta: return "";
  }
  return "t-Base";
}

Type typeof_constant(const Value& k) {
  switch (k->kind) {
    case TermKind::Bool: return t_bool();
    case TermKind::BitVec: return t_bv(k->width);
    case TermKind::String: return t_string();
    default: throw std::invalid_argument("not a constant: " + to_source(k));
  }
}

bool typecheck_program(Program& prog, Diagnostics& diags) {
  Diagnostics local;
  Checker c(prog, local);
  c.declarations();
  if (!local.has_errors()) {
    for (Symbol f : prog.fun_order) c.function(prog.funs.at(f));
    for (auto& cl : prog.clauses) c.clause(cl);
  }
  bool ok = !local.has_errors();
  diags.append(local);
  return ok;
}

bool check_closed_expr(const Program& prog, Expr& e, const Type& expected, Diagnostics& diags) {
  Checker c(prog, diags);
  return c.closed(e, expected);
}

void rewrite_program(Program&) {}

}  // namespace flg
