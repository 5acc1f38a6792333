// Formula values -> SMT-LIB v2 scripts. Output must be byte-stable: every
// declaration list is sorted, names are derived from structural hashes only.

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <map>
#include <set>

#include "flg/smt.hpp"

namespace flg {
namespace {

// Lower-case names the solver treats as built-in; user constructors and
// functions with these names get a `!u` suffix.
const std::set<std::string>& reserved() {
  static const std::set<std::string> r = {
      "abs",    "and",     "as",       "concat",  "const",  "distinct", "div",    "exists",
      "extract", "false",  "forall",   "implies", "ite",    "let",      "match",  "mod",
      "not",    "or",      "par",      "rem",     "repeat", "select",   "store",  "true",
      "xor",    "bv2int",  "int2bv",   "bv2nat",  "nat2bv", "is",       "map",    "ext_rotate_left",
      "ext_rotate_right", "char",     "subset",  "union",  "intersection", "complement",
      "difference", "member", "empty"};
  return r;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '_') out += static_cast<char>(c);
    else if (out.empty() || out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string bv_literal(int width, std::uint64_t bits) {
  char buf[24];
  if (width == 64) std::snprintf(buf, sizeof buf, "#x%016" PRIx64, bits);
  else std::snprintf(buf, sizeof buf, "#x%08" PRIx64, static_cast<std::uint64_t>(bits & 0xffffffffu));
  return buf;
}

std::string string_literal(const std::string& s) {
  std::string out = "\"";
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    unsigned cp = c;
    std::size_t len = 1;
    if (c >= 0xC0 && c < 0xE0 && i + 1 < s.size()) {
      cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
      len = 2;
    } else if (c >= 0xE0 && c < 0xF0 && i + 2 < s.size()) {
      cp = ((c & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
      len = 3;
    } else if (c >= 0xF0 && i + 3 < s.size()) {
      cp = ((c & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
           ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
      len = 4;
    }
    i += len;
    if (cp == '"') {
      out += "\"\"";
    } else if (cp >= 0x20 && cp < 0x7F && cp != '\\') {
      out += static_cast<char>(cp);
    } else {
      char buf[16];
      std::snprintf(buf, sizeof buf, "\\u{%x}", cp);
      out += buf;
    }
  }
  return out + "\"";
}

// Collects what a set of assertions needs declared.
struct Needs {
  std::set<Symbol> adts;  // data types and uninterpreted sorts, closed under ctor arguments
  std::set<Symbol> ufs;
  std::map<std::string, Term> vars;  // free SMT variables by declared name
};

class Writer {
 public:
  Writer(const Program& p, const SmtSerializer& ser, std::vector<std::string>* warnings)
      : p_(p), ser_(ser), warnings_(warnings) {}

  Needs needs;

  void sort_needs(const Type& t) {
    if (!t) return;
    if (t->kind == TypeKind::Adt) {
      if (needs.adts.insert(t->name).second) {
        if (const AdtDecl* ad = p_.adt(t->name))
          for (Symbol c : ad->ctors)
            for (const auto& a : p_.ctors.at(c).args) sort_needs(erase_type(a));
      }
    }
    for (const auto& a : t->args) sort_needs(a);
  }

  void ctor_needs(Symbol c) {
    if (const CtorDecl* cd = p_.ctor(c)) sort_needs(t_adt(cd->adt));
  }

  std::string term(const Term& t, std::set<std::string>& bound) {
    if (t->kind != TermKind::Smt)
      throw RuntimeError("smt-serialize", "not a formula: " + to_source(t));
    auto args = [&](std::size_t from = 0, std::size_t to = SIZE_MAX) {
      std::string s;
      for (std::size_t i = from; i < t->args.size() && i < to; ++i) s += " " + term(t->args[i], bound);
      return s;
    };
    auto app = [&](const std::string& head) { return "(" + head + args() + ")"; };
    switch (t->op) {
      case SmtOp::Var: {
        std::string name = ser_.var_name(t);
        sort_needs(t->type);
        if (!bound.count(name)) needs.vars.emplace(name, t);
        return name;
      }
      case SmtOp::Const: {
        const Term& k = t->args[0];
        switch (k->kind) {
          case TermKind::Bool: return as_bool(k) ? "true" : "false";
          case TermKind::BitVec: return bv_literal(k->width, k->bits);
          case TermKind::String: return string_literal(k->str);
          default: throw RuntimeError("smt-serialize", "constant " + to_source(k) + " has no SMT form");
        }
      }
      case SmtOp::Ctor: {
        ctor_needs(t->sym);
        if (t->type) sort_needs(t->type);
        std::string head = ctor_name(t->sym);
        if (needs_as(t->sym)) {
          if (!t->type)
            throw RuntimeError("smt-serialize", "cannot determine the sort of constructor " + t->sym.str());
          head = "(as " + head + " " + ser_.sort(t->type) + ")";
        }
        return t->args.empty() ? head : app(head);
      }
      case SmtOp::Uf: {
        needs.ufs.insert(t->sym);
        if (const UfDecl* u = p_.uf(t->sym)) {
          for (const auto& a : u->args) sort_needs(erase_type(a));
          sort_needs(erase_type(u->ret));
        }
        std::string head = plain_name(t->sym);
        return t->args.empty() ? head : app(head);
      }
      case SmtOp::Not: return app("not");
      case SmtOp::And: return app("and");
      case SmtOp::Or: return app("or");
      case SmtOp::Imp: return app("=>");
      case SmtOp::Iff:
      case SmtOp::Eq: return app("=");
      case SmtOp::Ite: return app("ite");
      case SmtOp::Let: {
        const Term& x = t->args[0];
        std::string name = ser_.var_name(x);
        sort_needs(x->type);
        std::string val = term(t->args[1], bound);
        bool fresh = bound.insert(name).second;
        std::string body = term(t->args[2], bound);
        if (fresh) bound.erase(name);
        return "(let ((" + name + " " + val + ")) " + body + ")";
      }
      case SmtOp::Forall:
      case SmtOp::Exists: {
        std::size_t n = static_cast<std::size_t>(t->index);
        std::string decl;
        std::vector<std::string> added;
        for (std::size_t i = 0; i < n; ++i) {
          const Term& x = t->args[i];
          std::string name = ser_.var_name(x);
          sort_needs(x->type);
          decl += std::string(i ? " " : "") + "(" + name + " " + ser_.sort(x->type) + ")";
          if (bound.insert(name).second) added.push_back(name);
        }
        std::string body = term(t->args[n], bound);
        std::string pats;
        for (std::size_t i = n + 1; i < t->args.size(); ++i) {
          std::string why = pattern_problem(t->args[i]);
          if (!why.empty()) {
            if (warnings_)
              warnings_->push_back("dropping quantifier pattern " + to_source(t->args[i]) + ": " + why);
            continue;
          }
          pats += " :pattern (" + term(t->args[i], bound) + ")";
        }
        for (const auto& a : added) bound.erase(a);
        if (!pats.empty()) body = "(! " + body + pats + ")";
        return std::string("(") + (t->op == SmtOp::Forall ? "forall" : "exists") + " (" + decl + ") " +
               body + ")";
      }
      case SmtOp::Tester:
        ctor_needs(t->sym);
        return "((_ is " + ctor_name(t->sym) + ")" + args() + ")";
      case SmtOp::Getter:
        ctor_needs(t->sym);
        return "(" + ctor_name(t->sym) + "!" + std::to_string(t->index) + args() + ")";
      case SmtOp::BvConst: {
        const Term& a = t->args[0];
        if (a->op == SmtOp::Const && a->args[0]->kind == TermKind::BitVec) {
          std::int64_t v = bv_signed(a->args[0]);
          return bv_literal(t->index, static_cast<std::uint64_t>(v));
        }
        std::string inner = term(a, bound);
        if (t->index == 32) return inner;
        return "((_ sign_extend " + std::to_string(t->index - 32) + ") " + inner + ")";
      }
      case SmtOp::BvNeg: return app("bvneg");
      case SmtOp::BvNot: return app("bvnot");
      case SmtOp::BvAdd: return app("bvadd");
      case SmtOp::BvSub: return app("bvsub");
      case SmtOp::BvMul: return app("bvmul");
      case SmtOp::BvSdiv: return app("bvsdiv");
      case SmtOp::BvSrem: return app("bvsrem");
      case SmtOp::BvUdiv: return app("bvudiv");
      case SmtOp::BvUrem: return app("bvurem");
      case SmtOp::BvAnd: return app("bvand");
      case SmtOp::BvOr: return app("bvor");
      case SmtOp::BvXor: return app("bvxor");
      case SmtOp::BvShl: return app("bvshl");
      case SmtOp::BvLshr: return app("bvlshr");
      case SmtOp::BvAshr: return app("bvashr");
      case SmtOp::BvSlt: return app("bvslt");
      case SmtOp::BvSle: return app("bvsle");
      case SmtOp::BvSgt: return app("bvsgt");
      case SmtOp::BvSge: return app("bvsge");
      case SmtOp::BvUlt: return app("bvult");
      case SmtOp::BvUle: return app("bvule");
      case SmtOp::BvUgt: return app("bvugt");
      case SmtOp::BvUge: return app("bvuge");
    }
    throw RuntimeError("smt-serialize", "unknown formula node");
  }

  std::string plain_name(Symbol s) const {
    std::string n = s.str();
    return reserved().count(n) ? n + "!u" : n;
  }
  std::string ctor_name(Symbol c) const { return plain_name(c); }

 private:
  // A constructor needs `(as c S)` when its arguments do not fix every type
  // parameter of its data type.
  bool needs_as(Symbol c) const {
    const CtorDecl* cd = p_.ctor(c);
    if (!cd) return false;
    const AdtDecl& ad = p_.adts.at(cd->adt);
    for (Symbol prm : ad.params) {
      bool seen = false;
      for (const auto& a : cd->args) seen |= type_mentions_param(a, prm);
      if (!seen) return true;
    }
    return false;
  }

  static bool has_binder(const Term& t) {
    if (t->kind != TermKind::Smt) return false;
    if (t->op == SmtOp::Forall || t->op == SmtOp::Exists || t->op == SmtOp::Let) return true;
    for (const auto& a : t->args)
      if (has_binder(a)) return true;
    return false;
  }

  static std::string pattern_problem(const Term& t) {
    if (has_binder(t)) return "patterns may not contain binders";
    if (t->kind == TermKind::Smt && (t->op == SmtOp::Var || t->op == SmtOp::Const))
      return "a pattern must be a function application";
    return {};
  }

  const Program& p_;
  const SmtSerializer& ser_;
  std::vector<std::string>* warnings_;
};

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex16(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

const std::string& smt_prelude() {
  static const std::string p =
      "(set-option :print-success false)\n"
      "(set-option :produce-models true)\n"
      "(set-logic ALL)\n";
  return p;
}

std::string SmtSerializer::sort(const Type& t) const {
  switch (t->kind) {
    case TypeKind::Bool: return "Bool";
    case TypeKind::String: return "String";
    case TypeKind::BitVec: return "(_ BitVec " + std::to_string(t->width) + ")";
    case TypeKind::Adt: {
      std::string n = t->name.str();
      if (reserved().count(n)) n += "!u";
      if (t->args.empty()) return n;
      std::string s = "(" + n;
      for (const auto& a : t->args) s += " " + sort(a);
      return s + ")";
    }
    case TypeKind::Param: return t->name.str();
    default: throw RuntimeError("smt-serialize", "type " + type_to_string(t) + " has no SMT sort");
  }
}

std::string SmtSerializer::var_name(const Term& var) const {
  const Term& name = var->args[0];
  std::string base = sanitize(name->kind == TermKind::String ? name->str : to_source(name));
  if (base.size() > 16) base.resize(16);
  if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0]))) base = "v" + base;
  std::string tag = var->type ? sanitize(type_to_string(var->type)) : "untyped";
  return base + "!" + hex16(name->hash) + "!" + tag;
}

SmtScript SmtSerializer::serialize(const std::vector<Value>& assertions, bool want_model,
                                   std::optional<std::int64_t> timeout_ms,
                                   std::vector<std::string>* warnings) const {
  Writer w(prog_, *this, warnings);
  std::vector<std::string> asserts;
  for (const auto& a : assertions) {
    std::set<std::string> bound;
    asserts.push_back(w.term(a, bound));
  }

  std::string decls;
  // Sorts first, then one block for all data types, then functions, then constants.
  std::vector<const AdtDecl*> datatypes;
  for (Symbol d : w.needs.adts) {
    const AdtDecl* ad = prog_.adt(d);
    if (!ad) throw RuntimeError("smt-serialize", "unknown type " + d.str());
    if (ad->uninterpreted_sort)
      decls += "(declare-sort " + sort(t_adt(d)) + " " + std::to_string(ad->params.size()) + ")\n";
    else
      datatypes.push_back(ad);
  }
  if (!datatypes.empty()) {
    std::string heads, bodies;
    for (const AdtDecl* ad : datatypes) {
      std::string n = sort(t_adt(ad->name));
      heads += std::string(heads.empty() ? "" : " ") + "(" + n + " " + std::to_string(ad->params.size()) + ")";
      std::map<Symbol, Type> inst;
      std::string par;
      for (std::size_t i = 0; i < ad->params.size(); ++i) {
        std::string tn = "T" + std::to_string(i);
        inst[ad->params[i]] = t_param(Symbol(tn));
        par += (i ? " " : "") + tn;
      }
      std::string ctors;
      for (Symbol c : ad->ctors) {
        const CtorDecl& cd = prog_.ctors.at(c);
        std::string cn = w.ctor_name(c);
        std::string s = "(" + cn;
        for (std::size_t i = 0; i < cd.args.size(); ++i)
          s += " (" + cn + "!" + std::to_string(i + 1) + " " +
               sort(erase_type(substitute_params(cd.args[i], inst))) + ")";
        ctors += std::string(ctors.empty() ? "" : " ") + s + ")";
      }
      std::string body = "(" + ctors + ")";
      if (!ad->params.empty()) body = "(par (" + par + ") " + body + ")";
      bodies += std::string(bodies.empty() ? "" : " ") + body;
    }
    decls += "(declare-datatypes (" + heads + ") (" + bodies + "))\n";
  }
  for (Symbol f : w.needs.ufs) {
    const UfDecl& u = prog_.ufs.at(f);
    std::string args;
    for (std::size_t i = 0; i < u.args.size(); ++i)
      args += (i ? " " : "") + sort(erase_type(u.args[i]));
    decls += "(declare-fun " + w.plain_name(f) + " (" + args + ") " + sort(erase_type(u.ret)) + ")\n";
  }
  SmtScript out;
  for (const auto& [name, var] : w.needs.vars) {
    decls += "(declare-const " + name + " " + sort(var->type) + ")\n";
    out.vars.emplace_back(name, var);
  }

  std::int64_t to = timeout_ms ? *timeout_ms : 4294967295LL;
  std::string timeout_line = "(set-option :timeout " + std::to_string(to) + ")\n";
  std::string body = decls;
  for (const auto& a : asserts) body += "(assert " + a + ")\n";
  body += "(check-sat)\n";
  if (want_model) body += "(get-model)\n";
  body += "(pop 1)\n";

  out.text = "(push 1)\n" + timeout_line + body;
  out.key = fnv1a("(push 1)\n" + body);
  out.content = fnv1a(out.text);
  out.want_model = want_model;
  return out;
}

}  // namespace flg
