#include "flg/desugar.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

namespace flg {
namespace {

[[noreturn]] void fail(const SourceSpan& at, const std::string& rule, const std::string& msg) {
  throw DiagnosticError({Severity::Error, at, rule, msg});
}

bool upper_initial(const std::string& s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) ||
                        (s[0] == '%'));
}

const std::map<std::string, std::pair<SmtOp, int>>& named_smt_ops() {
  static const std::map<std::string, std::pair<SmtOp, int>> m = [] {
    std::map<std::string, std::pair<SmtOp, int>> r;
    auto add = [&](SmtOp op, int n) { r[smt_op_name(op)] = {op, n}; };
    add(SmtOp::Not, 1);
    add(SmtOp::And, 2);
    add(SmtOp::Or, 2);
    add(SmtOp::Imp, 2);
    add(SmtOp::Iff, 2);
    add(SmtOp::Eq, 2);
    add(SmtOp::Ite, 3);
    add(SmtOp::Let, 3);
    add(SmtOp::BvConst, 1);
    add(SmtOp::BvNeg, 1);
    add(SmtOp::BvNot, 1);
    for (int op = static_cast<int>(SmtOp::BvAdd); op <= static_cast<int>(SmtOp::BvUge); ++op)
      add(static_cast<SmtOp>(op), 2);
    return r;
  }();
  return m;
}

const std::map<std::string, std::pair<BuiltinOp, int>>& named_builtins() {
  static const std::map<std::string, std::pair<BuiltinOp, int>> m = {
      {"to_string", {BuiltinOp::ToString, 1}}, {"is_sat", {BuiltinOp::IsSat, 1}},
      {"is_valid", {BuiltinOp::IsValid, 1}},   {"is_sat_opt", {BuiltinOp::IsSatOpt, 2}},
      {"get_model", {BuiltinOp::GetModel, 2}}, {"query_model", {BuiltinOp::QueryModel, 2}},
  };
  return m;
}

const std::map<std::string, BuiltinOp>& infix_builtins() {
  static const std::map<std::string, BuiltinOp> m = {
      {"+", BuiltinOp::Add}, {"-", BuiltinOp::Sub},  {"*", BuiltinOp::Mul},
      {"/", BuiltinOp::Div}, {"%", BuiltinOp::Rem},  {"<", BuiltinOp::Lt},
      {"<=", BuiltinOp::Le}, {">", BuiltinOp::Gt},   {">=", BuiltinOp::Ge},
      {"=", BuiltinOp::Eq},  {"!=", BuiltinOp::Ne},  {"&&", BuiltinOp::And},
      {"||", BuiltinOp::Or}, {"^", BuiltinOp::Concat},
  };
  return m;
}

const std::map<std::string, SmtOp>& infix_formula_ops() {
  static const std::map<std::string, SmtOp> m = {
      {"/\\", SmtOp::And}, {"\\/", SmtOp::Or}, {"==>", SmtOp::Imp},
      {"<==>", SmtOp::Iff}, {"#=", SmtOp::Eq},
  };
  return m;
}

struct LocalFun {
  Symbol source;
  Symbol lifted;
  std::vector<Symbol> captures;
  std::size_t arity = 0;
};

struct Scope {
  std::vector<Symbol> vars;
  std::vector<LocalFun> funs;
  bool clause = false;
  int* fresh = nullptr;  // clause-wide fresh-name counter

  bool has_var(Symbol x) const {
    return std::find(vars.begin(), vars.end(), x) != vars.end();
  }
  const LocalFun* fun(Symbol f) const {
    for (auto it = funs.rbegin(); it != funs.rend(); ++it)
      if (it->source == f) return &*it;
    return nullptr;
  }
};

struct RecordInfo {
  Symbol adt;
  Symbol ctor;
  std::vector<Symbol> fields;
};

class Resolver {
 public:
  Resolver(Program& p, bool allow_lift) : p_(p), allow_lift_(allow_lift) {
    for (const auto& [name, adt] : p_.adts)
      if (!adt.fields.empty()) records_.push_back({name, adt.ctors[0], adt.fields});
  }

  void add_record(RecordInfo r) { records_.push_back(std::move(r)); }

  // ---- types ---------------------------------------------------------------

  // `allowed` null: any type parameter is accepted and appended to `seen`.
  Type type(const SType& t, const std::vector<Symbol>* allowed, std::vector<Symbol>* seen) {
    switch (t.kind) {
      case SType::Kind::Param: {
        Symbol a(t.name);
        if (allowed && std::find(allowed->begin(), allowed->end(), a) == allowed->end())
          fail(t.span, "t-TVar", "type variable " + t.name + " is not in scope");
        if (seen && std::find(seen->begin(), seen->end(), a) == seen->end())
          seen->push_back(a);
        return t_param(a);
      }
      case SType::Kind::BV:
        if (t.width != 32 && t.width != 64)
          fail(t.span, "t-BV", "unsupported bit-vector width " + std::to_string(t.width) +
                                   " (supported: 32, 64)");
        return t_bv(t.width);
      case SType::Kind::Tuple: {
        if (t.args.size() > 8) fail(t.span, "t-Tuple", "tuples have at most 8 components");
        std::vector<Type> parts;
        for (const auto& a : t.args) parts.push_back(type(*a, allowed, seen));
        Symbol tn = names::tuple(static_cast<int>(parts.size()));
        return t_adt(tn, std::move(parts));
      }
      case SType::Kind::Smt:
      case SType::Kind::Sym: {
        Type in = type(*t.args[0], allowed, seen);
        if (!is_pre_type(in))
          fail(t.span, t.kind == SType::Kind::Smt ? "τ-SMT" : "τ-Sym",
               "smt/sym may only wrap a pre-type, not " + type_to_string(in));
        return t.kind == SType::Kind::Smt ? t_smt(in) : t_sym(in);
      }
      case SType::Kind::Name: break;
    }
    std::vector<Type> args;
    for (const auto& a : t.args) args.push_back(type(*a, allowed, seen));
    auto arity = [&](std::size_t n) {
      if (args.size() != n)
        fail(t.span, "t-Adt",
             "type " + t.name + " expects " + std::to_string(n) + " argument(s), got " +
                 std::to_string(args.size()));
    };
    if (t.name == "bool") return arity(0), t_bool();
    if (t.name == "string") return arity(0), t_string();
    if (t.name == "model") return arity(0), t_model();
    if (t.name == "i32") return arity(0), t_bv(32);
    if (t.name == "i64") return arity(0), t_bv(64);
    Symbol name(t.name);
    if (auto it = p_.aliases.find(name); it != p_.aliases.end()) {
      arity(it->second.params.size());
      std::map<Symbol, Type> sub;
      for (std::size_t i = 0; i < args.size(); ++i) sub[it->second.params[i]] = args[i];
      try {
        return substitute_params(it->second.body, sub);
      } catch (const std::invalid_argument& e) {
        fail(t.span, "τ-SMT", e.what());
      }
    }
    if (resolve_alias_hook_ && resolve_alias_hook_(name)) return type(t, allowed, seen);
    if (auto it = p_.adts.find(name); it != p_.adts.end()) {
      arity(it->second.params.size());
      return t_adt(name, std::move(args));
    }
    fail(t.span, "t-Adt", "unknown type " + t.name);
  }

  std::function<bool(Symbol)> resolve_alias_hook_;

  // ---- expressions ---------------------------------------------------------

  ExprPtr expr(const SNode& n, Scope& sc) {
    switch (n.kind) {
      case SKind::Ident: return ident(n, sc);
      case SKind::Wildcard:
        if (sc.clause && sc.fresh) return var(fresh(sc), n.span);
        fail(n.span, "resolve", "'_' is only allowed in patterns and relation arguments");
      case SKind::Query:
        fail(n.span, "resolve", "'?" "?' is only allowed as a relation argument");
      case SKind::Int: return constant(int_value(n), n.span);
      case SKind::Bool: return constant(mk_bool(n.bval), n.span);
      case SKind::String: return constant(mk_string(n.text), n.span);
      case SKind::Call: return call(n, sc);
      case SKind::IndexedCall:
        fail(n.span, "resolve", "indexed formula constructor " + n.text +
                                    " outside a quotation");
      case SKind::Tuple: {
        if (n.kids.size() > 8) fail(n.span, "resolve", "tuples have at most 8 components");
        auto e = make_expr(ExprKind::Ctor, n.span);
        e->name = names::tuple(static_cast<int>(n.kids.size()));
        for (const auto& k : n.kids) e->args.push_back(expr(*k, sc));
        return e;
      }
      case SKind::List: {
        auto acc = make_expr(ExprKind::Ctor, n.span);
        acc->name = names::nil();
        for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it) {
          auto c = make_expr(ExprKind::Ctor, (*it)->span);
          c->name = names::cons();
          c->args = {expr(**it, sc), acc};
          acc = c;
        }
        return acc;
      }
      case SKind::Binary: {
        if (n.text == "::") {
          auto e = make_expr(ExprKind::Ctor, n.span);
          e->name = names::cons();
          e->args = {expr(*n.kids[0], sc), expr(*n.kids[1], sc)};
          return e;
        }
        auto it = infix_builtins().find(n.text);
        if (it == infix_builtins().end())
          fail(n.span, "resolve", "formula operator '" + n.text + "' outside a quotation");
        auto e = make_expr(ExprKind::Op, n.span);
        e->op = it->second;
        e->args = {expr(*n.kids[0], sc), expr(*n.kids[1], sc)};
        return e;
      }
      case SKind::Unary: {
        if (n.text == "~")
          fail(n.span, "resolve", "formula operator '~' outside a quotation");
        auto e = make_expr(ExprKind::Op, n.span);
        e->op = n.text == "-" ? BuiltinOp::Neg : BuiltinOp::Not;
        e->args = {expr(*n.kids[0], sc)};
        return e;
      }
      case SKind::If: {
        auto e = make_expr(ExprKind::If, n.span);
        for (const auto& k : n.kids) e->args.push_back(expr(*k, sc));
        return e;
      }
      case SKind::SmtIf:
      case SKind::Tester:
      case SKind::Getter:
      case SKind::Quant:
        fail(n.span, "resolve", "formula construct outside a quotation");
      case SKind::Let: return let(n, sc);
      case SKind::LetFun: return let_fun(n, sc);
      case SKind::Match: {
        auto e = make_expr(ExprKind::Match, n.span);
        e->args.push_back(expr(*n.kids[0], sc));
        for (const auto& c : n.cases) {
          std::size_t mark = sc.vars.size();
          std::vector<Symbol> bound;
          Pattern pat = pattern(*c.pat, bound);
          sc.vars.insert(sc.vars.end(), bound.begin(), bound.end());
          e->cases.push_back({std::move(pat), expr(*c.body, sc)});
          sc.vars.resize(mark);
        }
        return e;
      }
      case SKind::Record: return record(n, sc, false);
      case SKind::RecordUpdate: return record_update(n, sc);
      case SKind::Quote: {
        auto e = make_expr(ExprKind::Quote, n.span);
        e->args.push_back(formula(*n.kids[0], sc));
        return e;
      }
      case SKind::SmtVar:
      case SKind::SmtVarId: return smt_var(n, sc);
    }
    fail(n.span, "resolve", "unsupported expression");
  }

  ExprPtr formula(const SNode& n, Scope& sc) {
    switch (n.kind) {
      case SKind::Ident: {
        Symbol x(n.text);
        if (sc.has_var(x) || sc.fun(x) || (sc.clause && upper_initial(n.text)) ||
            p_.fun(x) || p_.rel(x))
          return unquote(expr(n, sc));
        if (const CtorDecl* c = p_.ctor(x)) {
          if (!c->args.empty())
            fail(n.span, "resolve", "constructor " + n.text + " expects arguments");
          return smt(SmtOp::Ctor, n.span, x);
        }
        if (const UfDecl* u = p_.uf(x)) {
          if (!u->args.empty())
            fail(n.span, "resolve", "uninterpreted function " + n.text + " expects arguments");
          return smt(SmtOp::Uf, n.span, x);
        }
        return unquote(expr(n, sc));  // reports the unknown name
      }
      case SKind::Int:
      case SKind::Bool:
      case SKind::String: return unquote(expr(n, sc));
      case SKind::Wildcard:
      case SKind::Query: return expr(n, sc);  // reports the misuse
      case SKind::Call: {
        Symbol f(n.text);
        if (!sc.fun(f)) {
          if (const CtorDecl* c = p_.ctor(f)) {
            if (c->args.size() != n.kids.size())
              fail(n.span, "resolve", arity_msg("constructor", n.text, c->args.size(), n.kids.size()));
            auto e = smt(SmtOp::Ctor, n.span, f);
            for (const auto& k : n.kids) e->args.push_back(formula(*k, sc));
            return e;
          }
          if (const UfDecl* u = p_.uf(f)) {
            if (u->args.size() != n.kids.size())
              fail(n.span, "resolve", arity_msg("uninterpreted function", n.text, u->args.size(), n.kids.size()));
            auto e = smt(SmtOp::Uf, n.span, f);
            for (const auto& k : n.kids) e->args.push_back(formula(*k, sc));
            return e;
          }
          if (auto it = named_smt_ops().find(n.text); it != named_smt_ops().end()) {
            if (static_cast<int>(n.kids.size()) != it->second.second)
              fail(n.span, "resolve", arity_msg("formula constructor", n.text,
                                                it->second.second, n.kids.size()));
            auto e = smt(it->second.first, n.span);
            for (const auto& k : n.kids) e->args.push_back(formula(*k, sc));
            return e;
          }
        }
        return unquote(expr(n, sc));
      }
      case SKind::IndexedCall: {
        auto e = make_expr(ExprKind::Smt, n.span);
        if (n.text == "bv_const") {
          if (n.type || (n.index != 32 && n.index != 64))
            fail(n.span, "resolve", "bv_const takes a width index of 32 or 64");
          e->smt_op = SmtOp::BvConst;
          e->index = n.index;
        } else if (n.text == "smt_eq") {
          if (!n.type) fail(n.span, "resolve", "smt_eq takes a type index");
          e->smt_op = SmtOp::Eq;
          e->annot = type(*n.type, nullptr, nullptr);
        } else if (n.text == "smt_var") {
          if (!n.type || n.kids.size() != 1)
            fail(n.span, "resolve", "smt_var[t] takes a type index and one name");
          e->smt_op = SmtOp::Var;
          e->annot = type(*n.type, nullptr, nullptr);
          e->args.push_back(expr(*n.kids[0], sc));
          return e;
        } else {
          fail(n.span, "resolve", "unknown indexed formula constructor " + n.text);
        }
        std::size_t want = e->smt_op == SmtOp::BvConst ? 1 : 2;
        if (n.kids.size() != want)
          fail(n.span, "resolve", arity_msg("formula constructor", n.text, want, n.kids.size()));
        for (const auto& k : n.kids) e->args.push_back(formula(*k, sc));
        return e;
      }
      case SKind::Tuple: {
        if (n.kids.size() > 8) fail(n.span, "resolve", "tuples have at most 8 components");
        auto e = smt(SmtOp::Ctor, n.span, names::tuple(static_cast<int>(n.kids.size())));
        for (const auto& k : n.kids) e->args.push_back(formula(*k, sc));
        return e;
      }
      case SKind::List: {
        auto acc = smt(SmtOp::Ctor, n.span, names::nil());
        for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it) {
          auto c = smt(SmtOp::Ctor, (*it)->span, names::cons());
          c->args = {formula(**it, sc), acc};
          acc = c;
        }
        return acc;
      }
      case SKind::Binary: {
        if (n.text == "::") {
          auto e = smt(SmtOp::Ctor, n.span, names::cons());
          e->args = {formula(*n.kids[0], sc), formula(*n.kids[1], sc)};
          return e;
        }
        auto it = infix_formula_ops().find(n.text);
        if (it == infix_formula_ops().end()) return unquote(expr(n, sc));
        auto e = smt(it->second, n.span);
        e->args = {formula(*n.kids[0], sc), formula(*n.kids[1], sc)};
        return e;
      }
      case SKind::Unary: {
        if (n.text != "~") return unquote(expr(n, sc));
        auto e = smt(SmtOp::Not, n.span);
        e->args = {formula(*n.kids[0], sc)};
        return e;
      }
      case SKind::SmtIf: {
        auto e = smt(SmtOp::Ite, n.span);
        for (const auto& k : n.kids) e->args.push_back(formula(*k, sc));
        return e;
      }
      case SKind::Quote:
        fail(n.span, "resolve", "quotations cannot be nested inside a formula");
      case SKind::SmtVar:
      case SKind::SmtVarId: return smt_var(n, sc);
      case SKind::Tester:
      case SKind::Getter: {
        Symbol c(n.text);
        const CtorDecl* cd = p_.ctor(c);
        if (!cd) fail(n.span, "resolve", "unknown constructor " + n.text);
        if (n.kids.size() != 1)
          fail(n.span, "resolve", "testers and getters take exactly one argument");
        auto e = smt(n.kind == SKind::Tester ? SmtOp::Tester : SmtOp::Getter, n.span, c);
        if (n.kind == SKind::Getter) {
          if (n.index < 1 || n.index > static_cast<int>(cd->args.size()))
            fail(n.span, "resolve", "constructor " + n.text + " has no argument " +
                                        std::to_string(n.index));
          e->index = n.index;
        }
        e->args.push_back(formula(*n.kids[0], sc));
        return e;
      }
      case SKind::Quant: {
        auto e = smt(n.exists ? SmtOp::Exists : SmtOp::Forall, n.span);
        e->index = n.nvars;
        for (int i = 0; i < n.nvars; ++i) e->args.push_back(formula(*n.kids[i], sc));
        e->args.push_back(formula(*n.kids.back(), sc));
        for (int i = 0; i < n.npats; ++i) e->args.push_back(formula(*n.kids[n.nvars + i], sc));
        return e;
      }
      case SKind::Record: return record(n, sc, true);
      default: return unquote(expr(n, sc));
    }
  }

  // ---- patterns ------------------------------------------------------------

  Pattern pattern(const SNode& n, std::vector<Symbol>& bound) {
    Pattern p;
    p.span = n.span;
    switch (n.kind) {
      case SKind::Ident: {
        Symbol x(n.text);
        if (const CtorDecl* c = p_.ctor(x)) {
          if (!c->args.empty())
            fail(n.span, "resolve", "constructor " + n.text + " expects arguments");
          p.kind = Pattern::Kind::Ctor;
          p.name = x;
          return p;
        }
        if (std::find(bound.begin(), bound.end(), x) != bound.end())
          fail(n.span, "resolve", "variable " + n.text + " bound twice in one pattern");
        bound.push_back(x);
        p.kind = Pattern::Kind::Var;
        p.name = x;
        return p;
      }
      case SKind::Wildcard: p.kind = Pattern::Kind::Wild; return p;
      case SKind::Int:
        p.kind = Pattern::Kind::Const;
        p.constant = int_value(n);
        return p;
      case SKind::Bool:
        p.kind = Pattern::Kind::Const;
        p.constant = mk_bool(n.bval);
        return p;
      case SKind::String:
        p.kind = Pattern::Kind::Const;
        p.constant = mk_string(n.text);
        return p;
      case SKind::Call: {
        Symbol c(n.text);
        const CtorDecl* cd = p_.ctor(c);
        if (!cd) fail(n.span, "resolve", "unknown constructor " + n.text + " in pattern");
        if (cd->args.size() != n.kids.size())
          fail(n.span, "resolve", arity_msg("constructor", n.text, cd->args.size(), n.kids.size()));
        p.kind = Pattern::Kind::Ctor;
        p.name = c;
        for (const auto& k : n.kids) p.args.push_back(pattern(*k, bound));
        return p;
      }
      case SKind::Tuple:
        p.kind = Pattern::Kind::Ctor;
        p.name = names::tuple(static_cast<int>(n.kids.size()));
        for (const auto& k : n.kids) p.args.push_back(pattern(*k, bound));
        return p;
      case SKind::List: {
        Pattern acc;
        acc.kind = Pattern::Kind::Ctor;
        acc.name = names::nil();
        acc.span = n.span;
        std::vector<Pattern> elems;
        for (const auto& k : n.kids) elems.push_back(pattern(*k, bound));
        for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
          Pattern c;
          c.kind = Pattern::Kind::Ctor;
          c.name = names::cons();
          c.span = it->span;
          c.args = {*it, acc};
          acc = c;
        }
        return acc;
      }
      case SKind::Binary:
        if (n.text == "::") {
          p.kind = Pattern::Kind::Ctor;
          p.name = names::cons();
          p.args.push_back(pattern(*n.kids[0], bound));
          p.args.push_back(pattern(*n.kids[1], bound));
          return p;
        }
        break;
      case SKind::Record: {
        const RecordInfo& r = find_record(n, true);
        p.kind = Pattern::Kind::Ctor;
        p.name = r.ctor;
        p.args.resize(r.fields.size());
        for (auto& a : p.args) a.span = n.span;
        for (std::size_t i = 0; i < n.fields.size(); ++i) {
          std::size_t at = field_index(r, n.fields[i], n.span);
          p.args[at] = pattern(*n.kids[i], bound);
        }
        return p;
      }
      default: break;
    }
    fail(n.span, "resolve", "invalid pattern " + std::string());
  }

  int* lift_counter = nullptr;
  std::vector<Symbol>* lifted_order = nullptr;

 private:
  static std::string arity_msg(const char* what, const std::string& name, std::size_t want,
                               std::size_t got) {
    return std::string(what) + " " + name + " expects " + std::to_string(want) +
           " argument(s), got " + std::to_string(got);
  }

  static Value int_value(const SNode& n) { return mk_bv(n.width, n.ival); }

  static Symbol fresh(Scope& sc) { return Symbol("%V" + std::to_string((*sc.fresh)++)); }

  ExprPtr var(Symbol x, SourceSpan sp) {
    auto e = make_expr(ExprKind::Var, sp);
    e->name = x;
    return e;
  }
  ExprPtr constant(Value v, SourceSpan sp) {
    auto e = make_expr(ExprKind::Const, sp);
    e->constant = std::move(v);
    return e;
  }
  ExprPtr smt(SmtOp op, SourceSpan sp, Symbol sym = Symbol()) {
    auto e = make_expr(ExprKind::Smt, sp);
    e->smt_op = op;
    e->name = sym;
    return e;
  }
  ExprPtr unquote(ExprPtr inner) {
    auto e = make_expr(ExprKind::Unquote, inner->span);
    e->args.push_back(std::move(inner));
    return e;
  }

  ExprPtr local_call(const LocalFun& lf, std::vector<ExprPtr> args, SourceSpan sp) {
    auto e = make_expr(ExprKind::Call, sp);
    e->name = lf.lifted;
    e->args = std::move(args);
    for (Symbol c : lf.captures) e->args.push_back(var(c, sp));
    return e;
  }

  ExprPtr ident(const SNode& n, Scope& sc) {
    Symbol x(n.text);
    if (sc.has_var(x)) return var(x, n.span);
    if (const LocalFun* lf = sc.fun(x)) {
      if (lf->arity != 0)
        fail(n.span, "resolve", arity_msg("function", n.text, lf->arity, 0));
      return local_call(*lf, {}, n.span);
    }
    if (const CtorDecl* c = p_.ctor(x)) {
      if (!c->args.empty())
        fail(n.span, "resolve", arity_msg("constructor", n.text, c->args.size(), 0));
      auto e = make_expr(ExprKind::Ctor, n.span);
      e->name = x;
      return e;
    }
    if (const FunDecl* f = p_.fun(x)) {
      if (!f->params.empty())
        fail(n.span, "resolve", arity_msg("function", n.text, f->params.size(), 0));
      auto e = make_expr(ExprKind::Call, n.span);
      e->name = x;
      return e;
    }
    if (const RelDecl* r = p_.rel(x)) {
      if (!r->types.empty())
        fail(n.span, "resolve", arity_msg("relation", n.text, r->types.size(), 0));
      auto e = make_expr(ExprKind::RelQuery, n.span);
      e->name = x;
      return e;
    }
    if (p_.uf(x))
      fail(n.span, "resolve", "uninterpreted function " + n.text + " used outside a formula");
    if (sc.clause && upper_initial(n.text)) return var(x, n.span);
    fail(n.span, "e-Var", "unbound identifier " + n.text);
  }

  ExprPtr call(const SNode& n, Scope& sc) {
    Symbol f(n.text);
    if (const LocalFun* lf = sc.fun(f)) {
      if (lf->arity != n.kids.size())
        fail(n.span, "resolve", arity_msg("function", n.text, lf->arity, n.kids.size()));
      std::vector<ExprPtr> args;
      for (const auto& k : n.kids) args.push_back(expr(*k, sc));
      return local_call(*lf, std::move(args), n.span);
    }
    if (const CtorDecl* c = p_.ctor(f)) {
      if (c->args.size() != n.kids.size())
        fail(n.span, "resolve", arity_msg("constructor", n.text, c->args.size(), n.kids.size()));
      auto e = make_expr(ExprKind::Ctor, n.span);
      e->name = f;
      for (const auto& k : n.kids) e->args.push_back(expr(*k, sc));
      return e;
    }
    if (const FunDecl* fd = p_.fun(f)) {
      if (fd->params.size() != n.kids.size())
        fail(n.span, "resolve", arity_msg("function", n.text, fd->params.size(), n.kids.size()));
      auto e = make_expr(ExprKind::Call, n.span);
      e->name = f;
      for (const auto& k : n.kids) e->args.push_back(expr(*k, sc));
      return e;
    }
    if (const RelDecl* r = p_.rel(f)) {
      if (r->types.size() != n.kids.size())
        fail(n.span, "resolve", arity_msg("relation", n.text, r->types.size(), n.kids.size()));
      auto e = make_expr(ExprKind::RelQuery, n.span);
      e->name = f;
      for (const auto& k : n.kids) {
        if (k->kind == SKind::Query) {
          e->query.push_back(QueryArg::Wildcard);
          e->args.push_back(nullptr);
        } else if (k->kind == SKind::Wildcard) {
          e->query.push_back(QueryArg::Ignore);
          e->args.push_back(nullptr);
        } else {
          e->query.push_back(QueryArg::Expr);
          e->args.push_back(expr(*k, sc));
        }
      }
      return e;
    }
    if (auto it = named_builtins().find(n.text); it != named_builtins().end()) {
      if (static_cast<int>(n.kids.size()) != it->second.second)
        fail(n.span, "resolve", arity_msg("operator", n.text, it->second.second, n.kids.size()));
      auto e = make_expr(ExprKind::Op, n.span);
      e->op = it->second.first;
      for (const auto& k : n.kids) e->args.push_back(expr(*k, sc));
      return e;
    }
    if (named_smt_ops().count(n.text) || p_.uf(f))
      fail(n.span, "resolve", n.text + " builds a formula and may only appear inside a quotation");
    fail(n.span, "e-Fun", "unknown function " + n.text);
  }

  ExprPtr smt_var(const SNode& n, Scope& sc) {
    auto e = smt(SmtOp::Var, n.span);
    e->annot = type(*n.type, nullptr, nullptr);
    if (n.kind == SKind::SmtVarId)
      e->args.push_back(constant(mk_string(n.text), n.span));
    else
      e->args.push_back(expr(*n.kids[0], sc));
    return e;
  }

  ExprPtr let(const SNode& n, Scope& sc) {
    ExprPtr bound_e = expr(*n.kids[1], sc);
    std::vector<Symbol> bound;
    Pattern pat = pattern(*n.kids[0], bound);
    std::size_t mark = sc.vars.size();
    sc.vars.insert(sc.vars.end(), bound.begin(), bound.end());
    ExprPtr body = expr(*n.kids[2], sc);
    sc.vars.resize(mark);
    if (pat.kind == Pattern::Kind::Var || pat.kind == Pattern::Kind::Wild) {
      auto e = make_expr(ExprKind::Let, n.span);
      e->name = pat.kind == Pattern::Kind::Var ? pat.name : Symbol("%_");
      e->args = {bound_e, body};
      return e;
    }
    auto e = make_expr(ExprKind::Match, n.span);
    e->args.push_back(bound_e);
    e->cases.push_back({std::move(pat), body});
    return e;
  }

  // Identifiers mentioned anywhere under n (over-approximates free variables).
  static void mentioned(const SNode& n, std::set<std::string>& out) {
    if (n.kind == SKind::Ident || n.kind == SKind::Call) out.insert(n.text);
    for (const auto& k : n.kids) mentioned(*k, out);
    for (const auto& c : n.cases) {
      mentioned(*c.pat, out);
      mentioned(*c.body, out);
    }
    if (n.fun) mentioned(*n.fun->body, out);
  }

  ExprPtr let_fun(const SNode& n, Scope& sc) {
    if (!allow_lift_) fail(n.span, "resolve", "local functions are not allowed here");
    const SFun& f = *n.fun;
    std::set<std::string> ids;
    mentioned(*f.body, ids);
    std::set<Symbol> params;
    for (const auto& [x, _] : f.params) params.insert(Symbol(x));

    std::vector<Symbol> captures;
    auto capture = [&](Symbol x) {
      if (!params.count(x) && std::find(captures.begin(), captures.end(), x) == captures.end())
        captures.push_back(x);
    };
    for (Symbol v : sc.vars)
      if (ids.count(v.str())) capture(v);
    if (sc.clause)
      for (const auto& id : ids) {
        Symbol x(id);
        if (upper_initial(id) && !sc.has_var(x) && !p_.ctor(x) && !p_.fun(x) && !p_.rel(x))
          capture(x);
      }
    for (const auto& lf : sc.funs)
      if (ids.count(lf.source.str()))
        for (Symbol c : lf.captures) capture(c);

    LocalFun lf;
    lf.source = Symbol(f.name);
    lf.lifted = Symbol(f.name + "%" + std::to_string((*lift_counter)++));
    lf.captures = captures;
    lf.arity = f.params.size();

    FunDecl fd;
    fd.name = lf.lifted;
    fd.span = f.span;
    fd.lifted = true;
    std::vector<Symbol> tparams;
    for (const auto& [x, t] : f.params) {
      fd.params.emplace_back(x);
      fd.param_types.push_back(type(*t, nullptr, &tparams));
    }
    fd.ret = type(*f.ret, nullptr, &tparams);
    for (Symbol c : captures) {
      fd.params.push_back(c);
      fd.param_types.push_back(nullptr);
    }
    fd.type_params = tparams;

    // The body sees its parameters, captured variables and enclosing local
    // functions (including itself, for recursion).
    Scope inner;
    inner.vars = fd.params;
    inner.funs = sc.funs;
    inner.funs.push_back(lf);
    fd.body = expr(*f.body, inner);
    p_.funs[fd.name] = fd;
    lifted_order->push_back(fd.name);

    sc.funs.push_back(lf);
    ExprPtr body = expr(*n.kids[0], sc);
    sc.funs.pop_back();
    return body;
  }

  std::size_t field_index(const RecordInfo& r, const std::string& f, SourceSpan sp) {
    for (std::size_t i = 0; i < r.fields.size(); ++i)
      if (r.fields[i].str() == f) return i;
    fail(sp, "resolve", "record type " + r.adt.str() + " has no field " + f);
  }

  const RecordInfo& find_record(const SNode& n, bool subset) {
    std::set<std::string> given;
    for (const auto& f : n.fields)
      if (!given.insert(f).second) fail(n.span, "resolve", "duplicate field " + f);
    const RecordInfo* hit = nullptr;
    for (const auto& r : records_) {
      std::set<std::string> have;
      for (Symbol f : r.fields) have.insert(f.str());
      bool ok = subset ? std::includes(have.begin(), have.end(), given.begin(), given.end())
                       : have == given;
      if (!ok) continue;
      if (hit) fail(n.span, "resolve", "ambiguous record: fields match both " +
                                           hit->adt.str() + " and " + r.adt.str());
      hit = &r;
    }
    if (!hit) {
      // name the first unknown field when there is one
      for (const auto& f : given) {
        bool known = false;
        for (const auto& r : records_)
          for (Symbol g : r.fields) known |= g.str() == f;
        if (!known) fail(n.span, "resolve", "unknown record field " + f);
      }
      fail(n.span, "resolve", subset ? "no record type has all of these fields"
                                     : "record literal must give every field exactly once");
    }
    return *hit;
  }

  ExprPtr record(const SNode& n, Scope& sc, bool formula_mode) {
    const RecordInfo& r = find_record(n, false);
    std::vector<ExprPtr> args(r.fields.size());
    for (std::size_t i = 0; i < n.fields.size(); ++i)
      args[field_index(r, n.fields[i], n.span)] =
          formula_mode ? formula(*n.kids[i], sc) : expr(*n.kids[i], sc);
    ExprPtr e = formula_mode ? smt(SmtOp::Ctor, n.span, r.ctor) : make_expr(ExprKind::Ctor, n.span);
    e->name = r.ctor;
    e->args = std::move(args);
    return e;
  }

  ExprPtr record_update(const SNode& n, Scope& sc) {
    const RecordInfo& r = find_record(n, true);
    ExprPtr base = expr(*n.kids[0], sc);
    Symbol tmp("%r" + std::to_string((*lift_counter)++));
    auto ctor = make_expr(ExprKind::Ctor, n.span);
    ctor->name = r.ctor;
    ctor->args.resize(r.fields.size());
    for (std::size_t i = 0; i < n.fields.size(); ++i)
      ctor->args[field_index(r, n.fields[i], n.span)] = expr(*n.kids[i + 1], sc);
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
      if (ctor->args[i]) continue;
      auto get = make_expr(ExprKind::Call, n.span);
      get->name = r.fields[i];
      get->args.push_back(var(tmp, n.span));
      ctor->args[i] = get;
    }
    auto e = make_expr(ExprKind::Let, n.span);
    e->name = tmp;
    e->args = {base, ctor};
    return e;
  }

  Program& p_;
  bool allow_lift_;
  std::vector<RecordInfo> records_;
};

// ---- clause normalisation ---------------------------------------------------

class ClauseBuilder {
 public:
  ClauseBuilder(Clause& c, int& fresh) : c_(c), fresh_(fresh) {}

  void atom(Symbol rel, std::vector<ExprPtr> args, bool negated, SourceSpan sp) {
    Premise p;
    p.kind = negated ? PremiseKind::NegAtom : PremiseKind::PosAtom;
    p.span = sp;
    p.rel = rel;
    std::vector<std::pair<Symbol, ExprPtr>> post;
    for (auto& a : args) {
      if (a->kind == ExprKind::Var) {
        p.vars.push_back(a->name);
        continue;
      }
      Symbol v = fresh();
      p.vars.push_back(v);
      if (negated)
        bind(v, a, sp);  // must be computable before the lookup
      else
        post.emplace_back(v, a);
    }
    c_.body.push_back(p);
    if (!negated)
      for (Symbol v : p.vars) bound_.insert(v);
    for (auto& [v, a] : post) bind(v, a, sp);
  }

  void equation(ExprPtr l, ExprPtr r, SourceSpan sp) {
    if (l->kind == ExprKind::Var) return bind(l->name, r, sp);
    if (r->kind == ExprKind::Var) return bind(r->name, l, sp);
    Symbol v = fresh();
    if (ground(*r)) {
      bind(v, r, sp);
      bind(v, l, sp);
    } else {
      bind(v, l, sp);
      bind(v, r, sp);
    }
  }

  void disequation(ExprPtr l, ExprPtr r, SourceSpan sp) {
    Premise p;
    p.kind = PremiseKind::NegEq;
    p.span = sp;
    if (l->kind == ExprKind::Var) {
      p.var = l->name;
      p.expr = r;
    } else if (r->kind == ExprKind::Var) {
      p.var = r->name;
      p.expr = l;
    } else {
      p.var = fresh();
      bind(p.var, l, sp);
      p.expr = r;
    }
    c_.body.push_back(p);
  }

  void condition(ExprPtr e, SourceSpan sp) {
    Symbol v = fresh();
    bind(v, e, sp);
    auto t = make_expr(ExprKind::Const, sp);
    t->constant = mk_bool(true);
    push_eq(v, t, sp);
  }

  Symbol head_arg(ExprPtr e, std::vector<std::pair<Symbol, ExprPtr>>& tail) {
    if (e->kind == ExprKind::Var) return e->name;
    Symbol v = fresh();
    tail.emplace_back(v, e);
    return v;
  }

  void bind(Symbol y, ExprPtr e, SourceSpan sp) {
    if (ground(*e)) return push_eq(y, e, sp);
    ExprPtr pat = hoist(e, false, sp);
    push_eq(y, pat, sp);
    std::vector<Symbol> fv;
    free_vars(*pat, fv);
    bound_.insert(fv.begin(), fv.end());
  }

 private:
  Symbol fresh() { return Symbol("%V" + std::to_string(fresh_++)); }

  bool ground(const Expr& e) const {
    std::vector<Symbol> fv;
    free_vars(e, fv);
    for (Symbol x : fv)
      if (!bound_.count(x)) return false;
    return true;
  }

  void push_eq(Symbol y, ExprPtr e, SourceSpan sp) {
    Premise p;
    p.kind = PremiseKind::Eq;
    p.span = sp;
    p.var = y;
    p.expr = std::move(e);
    c_.body.push_back(std::move(p));
    bound_.insert(y);
  }

  // Pulls computable sub-terms out of a binding pattern so that what remains
  // is built only from constructors, constants and variables.
  ExprPtr hoist(ExprPtr e, bool formula, SourceSpan sp) {
    if (formula) {
      if (ground(*e)) {
        Symbol v = fresh();
        auto q = make_expr(ExprKind::Quote, e->span);
        q->args.push_back(e);
        push_eq(v, q, sp);
        auto var = make_expr(ExprKind::Var, e->span);
        var->name = v;
        auto u = make_expr(ExprKind::Unquote, e->span);
        u->args.push_back(var);
        return u;
      }
      if (e->kind == ExprKind::Smt) {
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          bool name_pos = e->smt_op == SmtOp::Var;
          e->args[i] = hoist(e->args[i], !name_pos, sp);
        }
      }
      return e;
    }
    if (ground(*e)) {
      if (e->kind == ExprKind::Var || e->kind == ExprKind::Const) return e;
      Symbol v = fresh();
      push_eq(v, e, sp);
      auto var = make_expr(ExprKind::Var, e->span);
      var->name = v;
      return var;
    }
    switch (e->kind) {
      case ExprKind::Ctor:
        for (auto& a : e->args) a = hoist(a, false, sp);
        break;
      case ExprKind::Quote: e->args[0] = hoist(e->args[0], true, sp); break;
      case ExprKind::Smt:
        if (e->smt_op == SmtOp::Var) e->args[0] = hoist(e->args[0], false, sp);
        break;
      default: break;
    }
    return e;
  }

  Clause& c_;
  int& fresh_;
  std::set<Symbol> bound_;
};

class Desugarer {
 public:
  Desugarer(Program& p, Diagnostics& d) : p_(p), d_(d), r_(p, true) {
    r_.lift_counter = &lift_counter_;
    r_.lifted_order = &lifted_;
  }

  void run(const std::vector<SourceProgram>& sources) {
    add_builtins();
    for (const auto& src : sources)
      for (const auto& d : src.decls) decls_.push_back(&d);
    guard([&] { collect_types(); });
    if (d_.has_errors()) return;
    for (const auto* d : decls_) guard([&] { signature(*d); });
    if (d_.has_errors()) return;
    std::vector<Symbol> declared = p_.fun_order;
    for (const auto* d : decls_)
      if (d->kind == SDecl::Kind::Fun) guard([&] { fun_body(*d->fun); });
    int cid = 0;
    for (const auto* d : decls_)
      if (d->kind == SDecl::Kind::Clause) guard([&] { clause(d->clause, cid++); });
    // lifted functions are checked first, innermost first
    p_.fun_order = lifted_;
    p_.fun_order.insert(p_.fun_order.end(), declared.begin(), declared.end());
  }

 private:
  template <class F>
  void guard(F&& f) {
    try {
      f();
    } catch (const DiagnosticError& e) {
      d_.add(e.diag);
    }
  }

  void add_builtin_adt(Symbol name, std::vector<Symbol> params,
                       std::vector<std::pair<Symbol, std::vector<Type>>> ctors) {
    AdtDecl a;
    a.name = name;
    a.params = std::move(params);
    a.builtin = true;
    for (auto& [c, args] : ctors) {
      a.ctors.push_back(c);
      p_.ctors[c] = CtorDecl{c, name, std::move(args), {}};
    }
    p_.adts[name] = a;
  }

  void add_builtins() {
    Symbol a("'a");
    add_builtin_adt(names::list(), {a},
                    {{names::nil(), {}}, {names::cons(), {t_param(a), t_adt(names::list(), {t_param(a)})}}});
    add_builtin_adt(names::option(), {a}, {{names::none(), {}}, {names::some(), {t_param(a)}}});
    for (int n = 2; n <= 8; ++n) {
      std::vector<Symbol> ps;
      std::vector<Type> args;
      for (int i = 0; i < n; ++i) {
        ps.emplace_back("'t" + std::to_string(i));
        args.push_back(t_param(ps.back()));
      }
      add_builtin_adt(names::tuple(n), ps, {{names::tuple(n), args}});
    }
  }

  static bool base_type_name(const std::string& s) {
    return s == "bool" || s == "string" || s == "model" || s == "i32" || s == "i64";
  }

  void claim_type_name(const std::string& name, SourceSpan sp) {
    Symbol s(name);
    if (base_type_name(name) || p_.adts.count(s) || pending_alias_.count(s) ||
        p_.aliases.count(s))
      fail(sp, "Delta-WF", "type " + name + " is declared more than once");
  }

  void collect_types() {
    std::vector<const STypeDef*> defs;
    for (const auto* d : decls_) {
      if (d->kind == SDecl::Kind::Types) {
        for (const auto& td : d->types) {
          claim_type_name(td.name, td.span);
          defs.push_back(&td);
          AdtDecl a;
          a.name = Symbol(td.name);
          a.span = td.span;
          for (const auto& ps : td.params) a.params.emplace_back(ps);
          if (td.kind == STypeDef::Kind::Alias) {
            pending_alias_[a.name] = &td;
            continue;
          }
          if (td.kind == STypeDef::Kind::AliasOrCtor) {
            pending_alias_or_ctor_.push_back(&td);
            continue;
          }
          p_.adts[a.name] = a;
        }
      } else if (d->kind == SDecl::Kind::Sort) {
        claim_type_name(d->sort.name, d->sort.span);
        AdtDecl a;
        a.name = Symbol(d->sort.name);
        a.span = d->sort.span;
        a.uninterpreted_sort = true;
        for (const auto& ps : d->sort.params) a.params.emplace_back(ps);
        p_.adts[a.name] = a;
      }
    }
    // `type t = name` is an alias when `name` is a type, else a constructor.
    for (const auto* td : pending_alias_or_ctor_) {
      const std::string& target = td->alias->name;
      Symbol ts(target);
      if (base_type_name(target) || p_.adts.count(ts) || pending_alias_.count(ts)) {
        pending_alias_[Symbol(td->name)] = td;
      } else {
        AdtDecl a;
        a.name = Symbol(td->name);
        a.span = td->span;
        for (const auto& ps : td->params) a.params.emplace_back(ps);
        p_.adts[a.name] = a;
        ctor_only_.insert(td);
      }
    }
    r_.resolve_alias_hook_ = [this](Symbol s) { return resolve_alias(s); };
    for (const auto& [name, _] : std::map<Symbol, const STypeDef*>(pending_alias_))
      resolve_alias(name);
    r_.resolve_alias_hook_ = nullptr;

    for (const STypeDef* td : defs) {
      Symbol name(td->name);
      if (p_.aliases.count(name)) continue;
      AdtDecl& a = p_.adts[name];
      if (td->kind == STypeDef::Kind::Record) {
        record(*td, a);
        continue;
      }
      std::vector<SCtor> ctors = td->ctors;
      if (ctor_only_.count(td)) ctors.push_back({td->alias->name, {}, td->alias->span});
      for (const auto& c : ctors) {
        Symbol cn(c.name);
        if (p_.ctors.count(cn))
          fail(c.span, "Delta-Ctor", "constructor " + c.name +
                                         " already belongs to type " + p_.ctors[cn].adt.str());
        CtorDecl cd;
        cd.name = cn;
        cd.adt = name;
        cd.span = c.span;
        for (const auto& t : c.args) cd.args.push_back(r_.type(*t, &a.params, nullptr));
        p_.ctors[cn] = cd;
        a.ctors.push_back(cn);
      }
    }
  }

  bool resolve_alias(Symbol name) {
    auto it = pending_alias_.find(name);
    if (it == pending_alias_.end()) return false;
    const STypeDef* td = it->second;
    if (resolving_.count(name)) fail(td->span, "Delta-WF", "type alias " + name.str() + " is cyclic");
    resolving_.insert(name);
    TypeAlias al;
    for (const auto& ps : td->params) al.params.emplace_back(ps);
    al.body = r_.type(*td->alias, &al.params, nullptr);
    resolving_.erase(name);
    pending_alias_.erase(name);
    p_.aliases[name] = al;
    return true;
  }

  void record(const STypeDef& td, AdtDecl& a) {
    Symbol ctor("%rec_" + td.name);
    a.ctors.push_back(ctor);
    CtorDecl cd;
    cd.name = ctor;
    cd.adt = a.name;
    cd.span = td.span;
    std::vector<Type> params;
    for (Symbol ps : a.params) params.push_back(t_param(ps));
    Type self = t_adt(a.name, params);
    std::set<std::string> seen;
    for (const auto& [f, t] : td.fields) {
      if (!seen.insert(f).second) fail(td.span, "resolve", "duplicate field " + f);
      a.fields.emplace_back(f);
      cd.args.push_back(r_.type(*t, &a.params, nullptr));
    }
    p_.ctors[ctor] = cd;
    register_record(ctor, a.fields);
    r_.add_record({a.name, ctor, a.fields});
    for (std::size_t i = 0; i < a.fields.size(); ++i) {
      FunDecl g;
      g.name = a.fields[i];
      g.span = td.span;
      g.getter = true;
      g.type_params = a.params;
      Symbol x("%r");
      g.params = {x};
      g.param_types = {self};
      g.ret = cd.args[i];
      auto scrut = make_expr(ExprKind::Var, td.span);
      scrut->name = x;
      auto m = make_expr(ExprKind::Match, td.span);
      m->args.push_back(scrut);
      Pattern pat;
      pat.kind = Pattern::Kind::Ctor;
      pat.name = ctor;
      pat.span = td.span;
      for (std::size_t j = 0; j < a.fields.size(); ++j) {
        Pattern sub;
        sub.span = td.span;
        sub.kind = j == i ? Pattern::Kind::Var : Pattern::Kind::Wild;
        sub.name = Symbol("%f");
        pat.args.push_back(sub);
      }
      auto body = make_expr(ExprKind::Var, td.span);
      body->name = Symbol("%f");
      m->cases.push_back({pat, body});
      g.body = m;
      claim_value_name(g.name, td.span);
      p_.funs[g.name] = g;
      p_.fun_order.push_back(g.name);
    }
  }

  void claim_value_name(Symbol s, SourceSpan sp) {
    if (p_.ctors.count(s) || p_.funs.count(s) || p_.rels.count(s) || p_.ufs.count(s))
      fail(sp, "resolve", "name " + s.str() + " is already declared");
    static const std::set<std::string> reserved = [] {
      std::set<std::string> r;
      for (const auto& [k, _] : named_builtins()) r.insert(k);
      for (const auto& [k, _] : named_smt_ops()) r.insert(k);
      r.insert("smt_var");
      return r;
    }();
    if (reserved.count(s.str()))
      fail(sp, "resolve", "name " + s.str() + " is reserved for a built-in operator");
  }

  void signature(const SDecl& d) {
    switch (d.kind) {
      case SDecl::Kind::Fun: {
        const SFun& f = *d.fun;
        FunDecl fd;
        fd.name = Symbol(f.name);
        fd.span = f.span;
        for (const auto& [x, t] : f.params) {
          Symbol xs(x);
          if (std::find(fd.params.begin(), fd.params.end(), xs) != fd.params.end())
            fail(f.span, "F-WF", "parameter " + x + " declared twice");
          fd.params.push_back(xs);
          fd.param_types.push_back(r_.type(*t, nullptr, &fd.type_params));
        }
        fd.ret = r_.type(*f.ret, nullptr, &fd.type_params);
        claim_value_name(fd.name, f.span);
        p_.funs[fd.name] = fd;
        p_.fun_order.push_back(fd.name);
        break;
      }
      case SDecl::Kind::Rel: {
        RelDecl rd;
        rd.name = Symbol(d.rel.name);
        rd.span = d.rel.span;
        rd.input = d.rel.input;
        std::vector<Symbol> none;
        for (const auto& t : d.rel.types) rd.types.push_back(r_.type(*t, &none, nullptr));
        if (rd.types.size() > 31) fail(rd.span, "Φ-Rel", "relations have at most 31 columns");
        claim_value_name(rd.name, rd.span);
        p_.rels[rd.name] = rd;
        p_.rel_order.push_back(rd.name);
        break;
      }
      case SDecl::Kind::Uf: {
        UfDecl u;
        u.name = Symbol(d.uf.name);
        u.span = d.uf.span;
        std::vector<Symbol> none;
        auto pre = [&](const SType& st) {
          Type t = r_.type(st, &none, nullptr);
          return t->kind == TypeKind::Smt ? t->args[0] : t;  // `t smt` and `t` both accepted
        };
        for (const auto& t : d.uf.args) u.args.push_back(pre(*t));
        u.ret = pre(*d.uf.ret);
        claim_value_name(u.name, u.span);
        p_.ufs[u.name] = u;
        break;
      }
      default: break;
    }
  }

  void fun_body(const SFun& f) {
    FunDecl& fd = p_.funs[Symbol(f.name)];
    Scope sc;
    sc.vars = fd.params;
    fd.body = r_.expr(*f.body, sc);
  }

  void clause(const SClause& sc_src, int id) {
    Clause c;
    c.id = id;
    c.span = sc_src.span;
    c.fact = sc_src.body.empty();
    int fresh = 0;
    Scope sc;
    sc.clause = true;
    sc.fresh = &fresh;

    const SNode& head = *sc_src.head;
    if (head.kind != SKind::Call && head.kind != SKind::Ident)
      fail(head.span, "H-Clause", "a clause head must be a relation applied to arguments");
    c.head = Symbol(head.text);
    const RelDecl* rd = p_.rel(c.head);
    if (!rd) fail(head.span, "H-Clause", "undeclared relation " + head.text);
    if (rd->types.size() != head.kids.size())
      fail(head.span, "H-Clause", "relation " + head.text + " expects " +
                                      std::to_string(rd->types.size()) + " argument(s), got " +
                                      std::to_string(head.kids.size()));

    ClauseBuilder b(c, fresh);
    for (const auto& pn : sc_src.body) premise(*pn, sc, b);

    std::vector<std::pair<Symbol, ExprPtr>> tail;
    for (const auto& k : head.kids) {
      if (k->kind == SKind::Wildcard || k->kind == SKind::Query)
        fail(k->span, "H-Clause", "wildcards cannot appear in a clause head");
      c.head_vars.push_back(b.head_arg(r_.expr(*k, sc), tail));
    }
    for (auto& [v, e] : tail) b.bind(v, e, e->span);
    p_.clauses.push_back(std::move(c));
  }

  bool is_relation_ref(const SNode& n) const {
    return (n.kind == SKind::Call || n.kind == SKind::Ident) && p_.rel(Symbol(n.text));
  }

  std::vector<ExprPtr> atom_args(const SNode& n, Scope& sc) {
    std::vector<ExprPtr> args;
    for (const auto& k : n.kids) {
      if (k->kind == SKind::Query)
        fail(k->span, "resolve", "'?" "?' is only allowed in relation queries inside expressions");
      args.push_back(r_.expr(*k, sc));
    }
    return args;
  }

  void premise(const SNode& n, Scope& sc, ClauseBuilder& b) {
    if (is_relation_ref(n)) {
      check_arity(n);
      return b.atom(Symbol(n.text), atom_args(n, sc), false, n.span);
    }
    if (n.kind == SKind::Unary && n.text == "!") {
      const SNode& inner = *n.kids[0];
      if (is_relation_ref(inner)) {
        check_arity(inner);
        return b.atom(Symbol(inner.text), atom_args(inner, sc), true, n.span);
      }
      if (inner.kind == SKind::Binary && inner.text == "=")
        return b.disequation(r_.expr(*inner.kids[0], sc), r_.expr(*inner.kids[1], sc), n.span);
    }
    if (n.kind == SKind::Binary && n.text == "=")
      return b.equation(r_.expr(*n.kids[0], sc), r_.expr(*n.kids[1], sc), n.span);
    if (n.kind == SKind::Binary && n.text == "!=")
      return b.disequation(r_.expr(*n.kids[0], sc), r_.expr(*n.kids[1], sc), n.span);
    b.condition(r_.expr(n, sc), n.span);
  }

  void check_arity(const SNode& n) {
    const RelDecl* rd = p_.rel(Symbol(n.text));
    if (rd->types.size() != n.kids.size())
      fail(n.span, "P-PosAtom", "relation " + n.text + " expects " +
                                    std::to_string(rd->types.size()) + " argument(s), got " +
                                    std::to_string(n.kids.size()));
  }

  Program& p_;
  Diagnostics& d_;
  Resolver r_;
  std::vector<const SDecl*> decls_;
  std::map<Symbol, const STypeDef*> pending_alias_;
  std::vector<const STypeDef*> pending_alias_or_ctor_;
  std::set<const STypeDef*> ctor_only_;
  std::set<Symbol> resolving_;
  int lift_counter_ = 0;
  std::vector<Symbol> lifted_;
};

}  // namespace

Program desugar(const std::vector<SourceProgram>& sources, Diagnostics& diags) {
  Program p;
  if (!sources.empty()) p.path = sources.front().path;
  Desugarer(p, diags).run(sources);
  return p;
}

ExprPtr resolve_closed(const Program& prog, const SNode& n, Diagnostics& diags) {
  try {
    Resolver r(const_cast<Program&>(prog), false);
    Scope sc;
    return r.expr(n, sc);
  } catch (const DiagnosticError& e) {
    diags.add(e.diag);
    return nullptr;
  }
}

Type resolve_type_closed(const Program& prog, const SType& t, Diagnostics& diags) {
  try {
    Resolver r(const_cast<Program&>(prog), false);
    std::vector<Symbol> none;
    return r.type(t, &none, nullptr);
  } catch (const DiagnosticError& e) {
    diags.add(e.diag);
    return nullptr;
  }
}

}  // namespace flg
