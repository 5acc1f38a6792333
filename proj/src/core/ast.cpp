#include "flg/ast.hpp"

#include <algorithm>

namespace flg {

const char* builtin_name(BuiltinOp op) {
  switch (op) {
    case BuiltinOp::Add: return "+";
    case BuiltinOp::Sub: return "-";
    case BuiltinOp::Mul: return "*";
    case BuiltinOp::Div: return "/";
    case BuiltinOp::Rem: return "%";
    case BuiltinOp::Neg: return "-";
    case BuiltinOp::Lt: return "<";
    case BuiltinOp::Le: return "<=";
    case BuiltinOp::Gt: return ">";
    case BuiltinOp::Ge: return ">=";
    case BuiltinOp::Eq: return "==";
    case BuiltinOp::Ne: return "!=";
    case BuiltinOp::And: return "&&";
    case BuiltinOp::Or: return "||";
    case BuiltinOp::Not: return "!";
    case BuiltinOp::Concat: return "^";
    case BuiltinOp::ToString: return "to_string";
    case BuiltinOp::IsSat: return "is_sat";
    case BuiltinOp::IsValid: return "is_valid";
    case BuiltinOp::IsSatOpt: return "is_sat_opt";
    case BuiltinOp::GetModel: return "get_model";
    case BuiltinOp::QueryModel: return "query_model";
  }
  return "?";
}

ExprPtr make_expr(ExprKind k, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = span;
  return e;
}

namespace {
template <class M, class K>
auto* lookup(const M& m, const K& k) {
  auto it = m.find(k);
  return it == m.end() ? nullptr : &it->second;
}
}  // namespace

const CtorDecl* Program::ctor(Symbol c) const { return lookup(ctors, c); }
const FunDecl* Program::fun(Symbol f) const { return lookup(funs, f); }
const RelDecl* Program::rel(Symbol p) const { return lookup(rels, p); }
const UfDecl* Program::uf(Symbol f) const { return lookup(ufs, f); }
const AdtDecl* Program::adt(Symbol d) const { return lookup(adts, d); }

std::string to_string(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Var: return p.name.str();
    case Pattern::Kind::Wild: return "_";
    case Pattern::Kind::Const: return to_source(p.constant);
    case Pattern::Kind::Ctor: {
      std::string s = p.name.str();
      if (!p.args.empty()) {
        s += '(';
        for (std::size_t i = 0; i < p.args.size(); ++i) {
          if (i) s += ", ";
          s += to_string(p.args[i]);
        }
        s += ')';
      }
      return s;
    }
  }
  return "?";
}

namespace {

std::string args_str(const std::vector<ExprPtr>& args) {
  std::string s = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += to_string(*args[i]);
  }
  return s + ")";
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var: return e.name.str();
    case ExprKind::Const: return to_source(e.constant);
    case ExprKind::Ctor:
    case ExprKind::Call:
      return e.args.empty() ? e.name.str() + (e.kind == ExprKind::Call ? "()" : "")
                            : e.name.str() + args_str(e.args);
    case ExprKind::RelQuery: {
      std::string s = e.name.str() + "(";
      for (std::size_t i = 0; i < e.query.size(); ++i) {
        if (i) s += ", ";
        if (e.query[i] == QueryArg::Wildcard) s += "??";
        else if (e.query[i] == QueryArg::Ignore) s += "_";
        else s += to_string(*e.args[i]);
      }
      return s + ")";
    }
    case ExprKind::Op:
      switch (e.op) {
        case BuiltinOp::Neg:
        case BuiltinOp::Not:
          return std::string(builtin_name(e.op)) + to_string(*e.args[0]);
        case BuiltinOp::ToString:
        case BuiltinOp::IsSat:
        case BuiltinOp::IsValid:
        case BuiltinOp::IsSatOpt:
        case BuiltinOp::GetModel:
        case BuiltinOp::QueryModel:
          return std::string(builtin_name(e.op)) + args_str(e.args);
        default:
          return "(" + to_string(*e.args[0]) + " " + builtin_name(e.op) + " " +
                 to_string(*e.args[1]) + ")";
      }
    case ExprKind::Match: {
      std::string s = "match " + to_string(*e.args[0]) + " with";
      for (const auto& c : e.cases)
        s += " | " + to_string(c.pat) + " => " + to_string(*c.body);
      return s + " end";
    }
    case ExprKind::Let:
      return "let " + e.name.str() + " = " + to_string(*e.args[0]) + " in " +
             to_string(*e.args[1]);
    case ExprKind::If:
      return "if " + to_string(*e.args[0]) + " then " + to_string(*e.args[1]) +
             " else " + to_string(*e.args[2]);
    case ExprKind::Quote: return "`" + to_string(*e.args[0]) + "`";
    case ExprKind::Unquote: return "unquote(" + to_string(*e.args[0]) + ")";
    case ExprKind::Smt: {
      std::string head;
      switch (e.smt_op) {
        case SmtOp::Var:
          head = "smt_var[" + (e.annot ? type_to_string(e.annot) : std::string("?")) + "]";
          break;
        case SmtOp::Ctor: head = "ctor[" + e.name.str() + "]"; break;
        case SmtOp::Uf: head = "uf[" + e.name.str() + "]"; break;
        case SmtOp::Tester: head = "is[" + e.name.str() + "]"; break;
        case SmtOp::Getter:
          head = "get[" + e.name.str() + "," + std::to_string(e.index) + "]";
          break;
        case SmtOp::BvConst: head = "bv_const[" + std::to_string(e.index) + "]"; break;
        case SmtOp::Forall:
        case SmtOp::Exists:
          head = std::string(smt_op_name(e.smt_op)) + "[" + std::to_string(e.index) + "]";
          break;
        default: head = smt_op_name(e.smt_op);
      }
      return head + args_str(e.args);
    }
  }
  return "?";
}

std::string to_string(const Premise& p) {
  switch (p.kind) {
    case PremiseKind::PosAtom:
    case PremiseKind::NegAtom: {
      std::string s = p.kind == PremiseKind::NegAtom ? "!" : "";
      s += p.rel.str();
      if (!p.vars.empty()) {
        s += '(';
        for (std::size_t i = 0; i < p.vars.size(); ++i) {
          if (i) s += ", ";
          s += p.vars[i].str();
        }
        s += ')';
      }
      return s;
    }
    case PremiseKind::Eq: return p.var.str() + " = " + to_string(*p.expr);
    case PremiseKind::NegEq: return p.var.str() + " != " + to_string(*p.expr);
  }
  return "?";
}

std::string to_string(const Clause& c) {
  std::string s = c.head.str();
  if (!c.head_vars.empty()) {
    s += '(';
    for (std::size_t i = 0; i < c.head_vars.size(); ++i) {
      if (i) s += ", ";
      s += c.head_vars[i].str();
    }
    s += ')';
  }
  if (!c.body.empty()) {
    s += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i) s += ", ";
      s += to_string(c.body[i]);
    }
  }
  return s + ".";
}

namespace {

void pattern_vars(const Pattern& p, std::vector<Symbol>& out) {
  if (p.kind == Pattern::Kind::Var) out.push_back(p.name);
  for (const auto& a : p.args) pattern_vars(a, out);
}

void fv(const Expr& e, std::vector<Symbol>& bound, std::vector<Symbol>& out) {
  auto add = [&](Symbol x) {
    if (std::find(bound.begin(), bound.end(), x) == bound.end() &&
        std::find(out.begin(), out.end(), x) == out.end())
      out.push_back(x);
  };
  switch (e.kind) {
    case ExprKind::Var: add(e.name); return;
    case ExprKind::Let: {
      fv(*e.args[0], bound, out);
      bound.push_back(e.name);
      fv(*e.args[1], bound, out);
      bound.pop_back();
      return;
    }
    case ExprKind::Match: {
      fv(*e.args[0], bound, out);
      for (const auto& c : e.cases) {
        std::size_t mark = bound.size();
        pattern_vars(c.pat, bound);
        fv(*c.body, bound, out);
        bound.resize(mark);
      }
      return;
    }
    default:
      for (const auto& a : e.args)
        if (a) fv(*a, bound, out);
  }
}

}  // namespace

void free_vars(const Expr& e, std::vector<Symbol>& out) {
  std::vector<Symbol> bound;
  fv(e, bound, out);
}

}  // namespace flg
