#include "flg/value.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <mutex>
#include <unordered_map>

namespace flg {

const char* smt_op_name(SmtOp op) {
  switch (op) {
    case SmtOp::Var: return "smt_var";
    case SmtOp::Const: return "smt_const";
    case SmtOp::Ctor: return "smt_ctor";
    case SmtOp::Uf: return "smt_uf";
    case SmtOp::Not: return "smt_not";
    case SmtOp::And: return "smt_and";
    case SmtOp::Or: return "smt_or";
    case SmtOp::Imp: return "smt_imp";
    case SmtOp::Iff: return "smt_iff";
    case SmtOp::Eq: return "smt_eq";
    case SmtOp::Ite: return "smt_ite";
    case SmtOp::Let: return "smt_let";
    case SmtOp::Forall: return "smt_forall";
    case SmtOp::Exists: return "smt_exists";
    case SmtOp::Tester: return "smt_tester";
    case SmtOp::Getter: return "smt_getter";
    case SmtOp::BvConst: return "bv_const";
    case SmtOp::BvNeg: return "bv_neg";
    case SmtOp::BvNot: return "bv_not";
    case SmtOp::BvAdd: return "bv_add";
    case SmtOp::BvSub: return "bv_sub";
    case SmtOp::BvMul: return "bv_mul";
    case SmtOp::BvSdiv: return "bv_sdiv";
    case SmtOp::BvSrem: return "bv_srem";
    case SmtOp::BvUdiv: return "bv_udiv";
    case SmtOp::BvUrem: return "bv_urem";
    case SmtOp::BvAnd: return "bv_and";
    case SmtOp::BvOr: return "bv_or";
    case SmtOp::BvXor: return "bv_xor";
    case SmtOp::BvShl: return "bv_shl";
    case SmtOp::BvLshr: return "bv_lshr";
    case SmtOp::BvAshr: return "bv_ashr";
    case SmtOp::BvSlt: return "bv_slt";
    case SmtOp::BvSle: return "bv_sle";
    case SmtOp::BvSgt: return "bv_sgt";
    case SmtOp::BvSge: return "bv_sge";
    case SmtOp::BvUlt: return "bv_ult";
    case SmtOp::BvUle: return "bv_ule";
    case SmtOp::BvUgt: return "bv_ugt";
    case SmtOp::BvUge: return "bv_uge";
  }
  return "?";
}

namespace {

std::uint64_t compute_hash(const TermNode& n) {
  std::uint64_t h = hash_mix(kFnvOffset, static_cast<std::uint64_t>(n.kind));
  switch (n.kind) {
    case TermKind::Bool: h = hash_mix(h, n.bits); break;
    case TermKind::BitVec:
      h = hash_mix(h, n.width);
      h = hash_mix(h, n.bits);
      break;
    case TermKind::String: h = fnv1a(n.str, h); break;
    case TermKind::Ctor:
    case TermKind::Var: h = hash_mix(h, n.sym.stable_hash()); break;
    case TermKind::Smt:
      h = hash_mix(h, static_cast<std::uint64_t>(n.op));
      h = hash_mix(h, n.sym.stable_hash());
      h = hash_mix(h, static_cast<std::uint64_t>(n.index));
      if (n.type) h = hash_mix(h, type_hash(n.type));
      break;
    case TermKind::Model:
      if (n.model)
        for (const auto& [k, v] : n.model->entries) {
          h = hash_mix(h, k->hash);
          h = hash_mix(h, v->hash);
        }
      break;
  }
  for (const auto& a : n.args) h = hash_mix(h, a->hash);
  return h;
}

Term finish(std::shared_ptr<TermNode> n) {
  bool g = n->kind != TermKind::Var;
  for (const auto& a : n->args) g = g && a->ground;
  n->ground = g;
  n->hash = compute_hash(*n);
  return n;
}

std::uint64_t mask(int width) {
  return width >= 64 ? ~0ull : ((1ull << width) - 1);
}

}  // namespace

Term mk_bool(bool b) {
  static const Term t = [] {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Bool;
    n->bits = 1;
    return finish(n);
  }();
  static const Term f = [] {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Bool;
    n->bits = 0;
    return finish(n);
  }();
  return b ? t : f;
}

Term mk_bv(int width, std::uint64_t bits) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::BitVec;
  n->width = width;
  n->bits = bits & mask(width);
  return finish(n);
}

Term mk_bv32(std::int32_t v) {
  return mk_bv(32, static_cast<std::uint32_t>(v));
}
Term mk_bv64(std::int64_t v) { return mk_bv(64, static_cast<std::uint64_t>(v)); }

Term mk_string(std::string s) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::String;
  n->str = std::move(s);
  return finish(n);
}

Term mk_ctor(Symbol c, std::vector<Term> args) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Ctor;
  n->sym = c;
  n->args = std::move(args);
  return finish(n);
}

Term mk_var(Symbol name) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Var;
  n->sym = name;
  return finish(n);
}

Term mk_model(std::shared_ptr<const SmtModel> m) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Model;
  n->model = std::move(m);
  return finish(n);
}

Term mk_smt(SmtOp op, std::vector<Term> args, Symbol sym, Type type, int index) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Smt;
  n->op = op;
  n->args = std::move(args);
  n->sym = sym;
  n->type = std::move(type);
  n->index = index;
  return finish(n);
}

Term smt_var(Term name, Type pre_type) {
  return mk_smt(SmtOp::Var, {std::move(name)}, Symbol(), std::move(pre_type));
}
Term smt_const(Term k) { return mk_smt(SmtOp::Const, {std::move(k)}); }

std::int64_t bv_signed(const Term& t) {
  if (t->width == 32) return static_cast<std::int32_t>(static_cast<std::uint32_t>(t->bits));
  return static_cast<std::int64_t>(t->bits);
}

namespace {

template <class T>
int cmp3(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

int args_compare(const std::vector<Term>& a, const std::vector<Term>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (int c = term_compare(a[i], b[i])) return c;
  return cmp3(a.size(), b.size());
}

}  // namespace

int term_compare(const Term& a, const Term& b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return cmp3(a->kind, b->kind);
  switch (a->kind) {
    case TermKind::Bool: return cmp3(a->bits, b->bits);
    case TermKind::BitVec:
      if (a->width != b->width) return cmp3(a->width, b->width);
      return cmp3(bv_signed(a), bv_signed(b));
    case TermKind::String: {
      int c = a->str.compare(b->str);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case TermKind::Var: return a->sym == b->sym ? 0 : (a->sym < b->sym ? -1 : 1);
    case TermKind::Ctor:
      if (a->args.size() != b->args.size())
        return cmp3(a->args.size(), b->args.size());
      if (a->sym != b->sym) return a->sym < b->sym ? -1 : 1;
      return args_compare(a->args, b->args);
    case TermKind::Smt: {
      if (a->op != b->op) return cmp3(a->op, b->op);
      if (a->args.size() != b->args.size())
        return cmp3(a->args.size(), b->args.size());
      if (a->sym != b->sym) return a->sym < b->sym ? -1 : 1;
      if (a->index != b->index) return cmp3(a->index, b->index);
      if (!a->type != !b->type) return a->type ? 1 : -1;
      if (a->type)
        if (int c = type_compare(a->type, b->type)) return c;
      return args_compare(a->args, b->args);
    }
    case TermKind::Model:
      if (!a->model || !b->model) return cmp3(a->model != nullptr, b->model != nullptr);
      return model_compare(*a->model, *b->model);
  }
  return 0;
}

bool term_equal(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a->hash != b->hash) return false;
  return term_compare(a, b) == 0;
}

bool occurs_subterm(const Term& needle, const Term& hay) {
  if (term_equal(needle, hay)) return true;
  for (const auto& a : hay->args)
    if (occurs_subterm(needle, a)) return true;
  return false;
}

// ---- built-in names -------------------------------------------------------

namespace names {
Symbol list() { static Symbol s("list"); return s; }
Symbol nil() { static Symbol s("nil"); return s; }
Symbol cons() { static Symbol s("cons"); return s; }
Symbol option() { static Symbol s("option"); return s; }
Symbol none() { static Symbol s("none"); return s; }
Symbol some() { static Symbol s("some"); return s; }
Symbol tuple(int n) {
  static const std::vector<Symbol> t = [] {
    std::vector<Symbol> v;
    for (int i = 0; i <= 8; ++i) v.emplace_back("tuple" + std::to_string(i));
    return v;
  }();
  return t.at(n);
}
int tuple_arity(Symbol s) {
  const std::string& x = s.str();
  if (x.size() == 6 && x.compare(0, 5, "tuple") == 0 && x[5] >= '2' && x[5] <= '8')
    return x[5] - '0';
  return 0;
}
bool is_record_ctor(Symbol s) { return s.str().rfind("%rec_", 0) == 0; }
}  // namespace names

Term mk_list(const std::vector<Term>& elems) {
  Term acc = mk_ctor(names::nil());
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    acc = mk_ctor(names::cons(), {*it, acc});
  return acc;
}

Term mk_tuple(std::vector<Term> elems) {
  if (elems.size() == 1) return elems[0];
  Symbol tn = names::tuple(static_cast<int>(elems.size()));
  return mk_ctor(tn, std::move(elems));
}

// ---- models ----------------------------------------------------------------

void SmtModel::normalize() {
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    return term_compare(x.first, y.first) < 0;
  });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const auto& x, const auto& y) {
                              return term_equal(x.first, y.first);
                            }),
                entries.end());
}

std::optional<Value> SmtModel::lookup(const Term& var) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), var,
                             [](const auto& e, const Term& k) {
                               return term_compare(e.first, k) < 0;
                             });
  if (it != entries.end() && term_equal(it->first, var)) return it->second;
  return std::nullopt;
}

int model_compare(const SmtModel& a, const SmtModel& b) {
  for (std::size_t i = 0; i < a.entries.size() && i < b.entries.size(); ++i) {
    if (int c = term_compare(a.entries[i].first, b.entries[i].first)) return c;
    if (int c = term_compare(a.entries[i].second, b.entries[i].second)) return c;
  }
  return cmp3(a.entries.size(), b.entries.size());
}

// ---- records ---------------------------------------------------------------

namespace {
struct RecordRegistry {
  std::mutex mu;
  std::unordered_map<Symbol, std::vector<Symbol>> fields;
};
RecordRegistry& records() {
  static RecordRegistry* r = new RecordRegistry();
  return *r;
}
}  // namespace

void register_record(Symbol ctor, std::vector<Symbol> fields) {
  auto& r = records();
  std::lock_guard<std::mutex> lock(r.mu);
  r.fields[ctor] = std::move(fields);
}

const std::vector<Symbol>* record_fields(Symbol ctor) {
  auto& r = records();
  std::lock_guard<std::mutex> lock(r.mu);
  auto it = r.fields.find(ctor);
  return it == r.fields.end() ? nullptr : &it->second;
}

// ---- printing --------------------------------------------------------------

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

void print_term(const Term& t, std::string& out, bool formula);

void print_args(const std::vector<Term>& args, std::size_t from, std::size_t to,
                std::string& out, bool formula) {
  out += '(';
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ',';
    print_term(args[i], out, formula);
  }
  out += ')';
}

void print_ctor_like(Symbol c, const std::vector<Term>& args, std::string& out,
                     bool formula) {
  if (int n = names::tuple_arity(c); n && static_cast<int>(args.size()) == n) {
    print_args(args, 0, args.size(), out, formula);
    return;
  }
  if (const auto* fields = record_fields(c);
      fields && fields->size() == args.size()) {
    out += '{';
    for (std::size_t i = 0; i < args.size(); ++i) {
      out += (*fields)[i].str();
      out += '=';
      print_term(args[i], out, formula);
      out += ';';
    }
    out += '}';
    return;
  }
  out += c.str();
  if (!args.empty()) print_args(args, 0, args.size(), out, formula);
}

bool proper_list(const Term& t) {
  const TermNode* n = t.get();
  while (n->kind == TermKind::Ctor && n->sym == names::cons() && n->args.size() == 2)
    n = n->args[1].get();
  return n->kind == TermKind::Ctor && n->sym == names::nil() && n->args.empty();
}

void print_formula(const Term& t, std::string& out) {
  auto bin = [&](const char* op) {
    out += '(';
    print_formula(t->args[0], out);
    out += ' ';
    out += op;
    out += ' ';
    print_formula(t->args[1], out);
    out += ')';
  };
  switch (t->op) {
    case SmtOp::Var: {
      const Term& name = t->args[0];
      if (name->kind == TermKind::String && is_identifier(name->str)) {
        out += '#' + name->str;
      } else {
        out += "#{";
        print_term(name, out, false);
        out += '}';
      }
      out += '[' + (t->type ? type_to_string(t->type) : std::string("?")) + ']';
      return;
    }
    case SmtOp::Const: print_term(t->args[0], out, false); return;
    case SmtOp::Ctor: print_ctor_like(t->sym, t->args, out, true); return;
    case SmtOp::Uf:
      out += t->sym.str();
      if (!t->args.empty()) print_args(t->args, 0, t->args.size(), out, true);
      return;
    case SmtOp::Not:
      out += "~";
      print_formula(t->args[0], out);
      return;
    case SmtOp::And: bin("/\\"); return;
    case SmtOp::Or: bin("\\/"); return;
    case SmtOp::Imp: bin("==>"); return;
    case SmtOp::Iff: bin("<==>"); return;
    case SmtOp::Eq: bin("#="); return;
    case SmtOp::Ite:
      out += "(#if ";
      print_formula(t->args[0], out);
      out += " then ";
      print_formula(t->args[1], out);
      out += " else ";
      print_formula(t->args[2], out);
      out += ')';
      return;
    case SmtOp::Forall:
    case SmtOp::Exists: {
      out += t->op == SmtOp::Forall ? "(forall " : "(exists ";
      int nv = t->index;
      for (int i = 0; i < nv; ++i) {
        if (i) out += ", ";
        print_formula(t->args[i], out);
      }
      if (t->args.size() > static_cast<std::size_t>(nv) + 1) {
        out += " : ";
        for (std::size_t i = nv + 1; i < t->args.size(); ++i) {
          if (i > static_cast<std::size_t>(nv) + 1) out += ", ";
          print_formula(t->args[i], out);
        }
      }
      out += " . ";
      print_formula(t->args[nv], out);
      out += ')';
      return;
    }
    case SmtOp::Tester:
      out += "#is_" + t->sym.str();
      print_args(t->args, 0, t->args.size(), out, true);
      return;
    case SmtOp::Getter:
      out += '#' + t->sym.str() + '_' + std::to_string(t->index);
      print_args(t->args, 0, t->args.size(), out, true);
      return;
    case SmtOp::BvConst:
      out += "bv_const[" + std::to_string(t->index) + "]";
      print_args(t->args, 0, t->args.size(), out, true);
      return;
    default:
      out += smt_op_name(t->op);
      print_args(t->args, 0, t->args.size(), out, true);
      return;
  }
}

void print_term(const Term& t, std::string& out, bool formula) {
  switch (t->kind) {
    case TermKind::Bool: out += t->bits ? "true" : "false"; return;
    case TermKind::BitVec:
      out += std::to_string(bv_signed(t));
      if (t->width == 64) out += 'L';
      return;
    case TermKind::String: out += escape_string(t->str); return;
    case TermKind::Var: out += t->sym.str(); return;
    case TermKind::Model: {
      out += "<model";
      if (t->model)
        for (const auto& [k, v] : t->model->entries) {
          out += ' ';
          print_term(k, out, false);
          out += '=';
          print_term(v, out, false);
        }
      out += '>';
      return;
    }
    case TermKind::Ctor:
      if (!t->args.empty() && t->sym == names::cons() && proper_list(t)) {
        out += '[';
        const TermNode* n = t.get();
        bool first = true;
        while (n->sym == names::cons()) {
          if (!first) out += ',';
          first = false;
          print_term(n->args[0], out, formula);
          n = n->args[1].get();
        }
        out += ']';
        return;
      }
      if (t->sym == names::nil() && t->args.empty()) {
        out += "[]";
        return;
      }
      print_ctor_like(t->sym, t->args, out, formula);
      return;
    case TermKind::Smt:
      if (formula) {
        print_formula(t, out);
      } else {
        out += '`';
        print_formula(t, out);
        out += '`';
      }
      return;
  }
}

}  // namespace

std::string to_source(const Term& t) {
  std::string out;
  print_term(t, out, false);
  return out;
}

int tuple_compare(const Tuple& a, const Tuple& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (int c = term_compare(a[i], b[i])) return c;
  return cmp3(a.size(), b.size());
}

std::uint64_t tuple_hash(const Tuple& t) {
  std::uint64_t h = kFnvOffset;
  for (const auto& v : t) h = hash_mix(h, v->hash);
  return h;
}

}  // namespace flg
