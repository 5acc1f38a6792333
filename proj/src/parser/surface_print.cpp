#include <string>

#include "flg/parser.hpp"
#include "flg/value.hpp"

namespace flg {
namespace {

std::string int_text(const SNode& n) {
  std::uint64_t mag = n.ival;
  std::string s;
  if (n.text == "-") {
    mag = n.width == 32 ? static_cast<std::uint32_t>(-static_cast<std::uint32_t>(n.ival))
                        : static_cast<std::uint64_t>(-n.ival);
    s = "-";
  }
  s += std::to_string(mag);
  if (n.width == 64) s += 'L';
  return s;
}

std::string join(const std::vector<SNodePtr>& v, std::size_t from, std::size_t to,
                 const char* sep = ", ") {
  std::string s;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) s += sep;
    s += print_node(*v[i]);
  }
  return s;
}

std::string fun_header(const SFun& f) {
  std::string s = f.name;
  if (f.has_parens) {
    s += '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) s += ", ";
      s += f.params[i].first + ": " + print_type(*f.params[i].second);
    }
    s += ')';
  }
  return s + " : " + print_type(*f.ret) + " = " + print_node(*f.body);
}

}  // namespace

std::string print_type(const SType& t) {
  switch (t.kind) {
    case SType::Kind::Param: return t.name;
    case SType::Kind::BV: return "bv[" + std::to_string(t.width) + "]";
    case SType::Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += " * ";
        s += print_type(*t.args[i]);
      }
      return s + ")";
    }
    case SType::Kind::Smt: return print_type(*t.args[0]) + " smt";
    case SType::Kind::Sym: return print_type(*t.args[0]) + " sym";
    case SType::Kind::Name: {
      if (t.args.empty()) return t.name;
      if (t.args.size() == 1) return print_type(*t.args[0]) + " " + t.name;
      std::string s = "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ", ";
        s += print_type(*t.args[i]);
      }
      return s + ") " + t.name;
    }
  }
  return "?";
}

std::string print_node(const SNode& n) {
  switch (n.kind) {
    case SKind::Ident: return n.text;
    case SKind::Wildcard: return "_";
    case SKind::Query: return "??";
    case SKind::Int: return int_text(n);
    case SKind::Bool: return n.bval ? "true" : "false";
    case SKind::String: return escape_string(n.text);
    case SKind::Call: return n.text + "(" + join(n.kids, 0, n.kids.size()) + ")";
    case SKind::IndexedCall: {
      std::string s = n.text + "[" +
                      (n.type ? print_type(*n.type) : std::to_string(n.index)) + "]";
      if (!n.kids.empty()) s += "(" + join(n.kids, 0, n.kids.size()) + ")";
      return s;
    }
    case SKind::Tuple: return "(" + join(n.kids, 0, n.kids.size()) + ")";
    case SKind::List: return "[" + join(n.kids, 0, n.kids.size()) + "]";
    case SKind::Binary:
      return "(" + print_node(*n.kids[0]) + " " + n.text + " " + print_node(*n.kids[1]) + ")";
    case SKind::Unary: return n.text + "(" + print_node(*n.kids[0]) + ")";
    case SKind::If:
      return "(if " + print_node(*n.kids[0]) + " then " + print_node(*n.kids[1]) +
             " else " + print_node(*n.kids[2]) + ")";
    case SKind::SmtIf:
      return "(#if " + print_node(*n.kids[0]) + " then " + print_node(*n.kids[1]) +
             " else " + print_node(*n.kids[2]) + ")";
    case SKind::Let:
      return "(let " + print_node(*n.kids[0]) + " = " + print_node(*n.kids[1]) + " in " +
             print_node(*n.kids[2]) + ")";
    case SKind::LetFun:
      return "(let fun " + fun_header(*n.fun) + " in " + print_node(*n.kids[0]) + ")";
    case SKind::Match: {
      std::string s = "(match " + print_node(*n.kids[0]) + " with";
      for (const auto& c : n.cases)
        s += " | " + print_node(*c.pat) + " => " + print_node(*c.body);
      return s + " end)";
    }
    case SKind::Record:
    case SKind::RecordUpdate: {
      std::string s = "{ ";
      std::size_t off = 0;
      if (n.kind == SKind::RecordUpdate) {
        s += print_node(*n.kids[0]) + " with ";
        off = 1;
      }
      for (std::size_t i = 0; i < n.fields.size(); ++i)
        s += n.fields[i] + " = " + print_node(*n.kids[i + off]) + "; ";
      return s + "}";
    }
    case SKind::Quote: return "`" + print_node(*n.kids[0]) + "`";
    case SKind::SmtVar:
      return "#{" + print_node(*n.kids[0]) + "}[" + print_type(*n.type) + "]";
    case SKind::SmtVarId: return "#" + n.text + "[" + print_type(*n.type) + "]";
    case SKind::Tester: return "#is_" + n.text + "(" + join(n.kids, 0, n.kids.size()) + ")";
    case SKind::Getter:
      return "#" + n.text + "_" + std::to_string(n.index) + "(" +
             join(n.kids, 0, n.kids.size()) + ")";
    case SKind::Quant: {
      std::string s = n.exists ? "(exists " : "(forall ";
      s += join(n.kids, 0, n.nvars);
      if (n.npats) s += " : " + join(n.kids, n.nvars, n.nvars + n.npats);
      return s + " . " + print_node(*n.kids.back()) + ")";
    }
  }
  return "?";
}

std::string print_source(const SourceProgram& p) {
  std::string out;
  for (const auto& d : p.decls) {
    switch (d.kind) {
      case SDecl::Kind::Types: {
        bool first = true;
        for (const auto& td : d.types) {
          out += first ? "type " : "and ";
          first = false;
          if (!td.params.empty()) {
            out += "(";
            for (std::size_t i = 0; i < td.params.size(); ++i) {
              if (i) out += ", ";
              out += td.params[i];
            }
            out += ") ";
          }
          out += td.name + " =";
          switch (td.kind) {
            case STypeDef::Kind::Adt:
              for (const auto& c : td.ctors) {
                out += " | " + c.name;
                if (!c.args.empty()) {
                  out += "(";
                  for (std::size_t i = 0; i < c.args.size(); ++i) {
                    if (i) out += ", ";
                    out += print_type(*c.args[i]);
                  }
                  out += ")";
                }
              }
              break;
            case STypeDef::Kind::Record:
              out += " {";
              for (const auto& [f, t] : td.fields) out += " " + f + ": " + print_type(*t) + ";";
              out += " }";
              break;
            case STypeDef::Kind::Alias:
            case STypeDef::Kind::AliasOrCtor: out += " " + print_type(*td.alias); break;
          }
          out += "\n";
        }
        break;
      }
      case SDecl::Kind::Fun: out += "fun " + fun_header(*d.fun) + "\n"; break;
      case SDecl::Kind::Rel: {
        out += (d.rel.input ? "input " : "output ") + d.rel.name;
        if (!d.rel.types.empty()) {
          out += "(";
          for (std::size_t i = 0; i < d.rel.types.size(); ++i) {
            if (i) out += ", ";
            out += print_type(*d.rel.types[i]);
          }
          out += ")";
        }
        out += "\n";
        break;
      }
      case SDecl::Kind::Uf: {
        out += "uninterpreted fun " + d.uf.name + "(";
        for (std::size_t i = 0; i < d.uf.args.size(); ++i) {
          if (i) out += ", ";
          out += print_type(*d.uf.args[i]);
        }
        out += ") : " + print_type(*d.uf.ret) + "\n";
        break;
      }
      case SDecl::Kind::Sort: {
        out += "uninterpreted sort ";
        if (!d.sort.params.empty()) {
          out += "(";
          for (std::size_t i = 0; i < d.sort.params.size(); ++i) {
            if (i) out += ", ";
            out += d.sort.params[i];
          }
          out += ") ";
        }
        out += d.sort.name + "\n";
        break;
      }
      case SDecl::Kind::Clause: {
        out += print_node(*d.clause.head);
        if (!d.clause.body.empty())
          out += " :-\n    " + join(d.clause.body, 0, d.clause.body.size(), ",\n    ");
        out += ".\n";
        break;
      }
    }
  }
  return out;
}

// ---- structural equality ---------------------------------------------------

namespace {

bool type_eq(const STypePtr& a, const STypePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->name != b->name || a->width != b->width ||
      a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!type_eq(a->args[i], b->args[i])) return false;
  return true;
}

bool node_eq(const SNodePtr& a, const SNodePtr& b) {
  if (!a || !b) return !a && !b;
  return surface_equal(*a, *b);
}

bool fun_eq(const SFun& a, const SFun& b) {
  if (a.name != b.name || a.has_parens != b.has_parens ||
      a.params.size() != b.params.size() || !type_eq(a.ret, b.ret) ||
      !node_eq(a.body, b.body))
    return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].first != b.params[i].first ||
        !type_eq(a.params[i].second, b.params[i].second))
      return false;
  return true;
}

bool types_eq(const std::vector<STypePtr>& a, const std::vector<STypePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!type_eq(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool surface_equal(const SNode& a, const SNode& b) {
  if (a.kind != b.kind || a.text != b.text || a.ival != b.ival || a.width != b.width ||
      a.bval != b.bval || a.exists != b.exists || a.nvars != b.nvars ||
      a.npats != b.npats || a.index != b.index || !type_eq(a.type, b.type) ||
      a.fields != b.fields || a.kids.size() != b.kids.size() ||
      a.cases.size() != b.cases.size() || !a.fun != !b.fun)
    return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!node_eq(a.kids[i], b.kids[i])) return false;
  for (std::size_t i = 0; i < a.cases.size(); ++i)
    if (!node_eq(a.cases[i].pat, b.cases[i].pat) ||
        !node_eq(a.cases[i].body, b.cases[i].body))
      return false;
  return !a.fun || fun_eq(*a.fun, *b.fun);
}

bool surface_equal(const SourceProgram& a, const SourceProgram& b) {
  if (a.decls.size() != b.decls.size()) return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i) {
    const SDecl& x = a.decls[i];
    const SDecl& y = b.decls[i];
    if (x.kind != y.kind) return false;
    switch (x.kind) {
      case SDecl::Kind::Types:
        if (x.types.size() != y.types.size()) return false;
        for (std::size_t j = 0; j < x.types.size(); ++j) {
          const auto& s = x.types[j];
          const auto& t = y.types[j];
          if (s.kind != t.kind || s.params != t.params || s.name != t.name ||
              s.ctors.size() != t.ctors.size() || s.fields.size() != t.fields.size() ||
              !type_eq(s.alias, t.alias))
            return false;
          for (std::size_t k = 0; k < s.ctors.size(); ++k)
            if (s.ctors[k].name != t.ctors[k].name ||
                !types_eq(s.ctors[k].args, t.ctors[k].args))
              return false;
          for (std::size_t k = 0; k < s.fields.size(); ++k)
            if (s.fields[k].first != t.fields[k].first ||
                !type_eq(s.fields[k].second, t.fields[k].second))
              return false;
        }
        break;
      case SDecl::Kind::Fun:
        if (!fun_eq(*x.fun, *y.fun)) return false;
        break;
      case SDecl::Kind::Rel:
        if (x.rel.name != y.rel.name || x.rel.input != y.rel.input ||
            !types_eq(x.rel.types, y.rel.types))
          return false;
        break;
      case SDecl::Kind::Uf:
        if (x.uf.name != y.uf.name || !types_eq(x.uf.args, y.uf.args) ||
            !type_eq(x.uf.ret, y.uf.ret))
          return false;
        break;
      case SDecl::Kind::Sort:
        if (x.sort.name != y.sort.name || x.sort.params != y.sort.params) return false;
        break;
      case SDecl::Kind::Clause:
        if (!node_eq(x.clause.head, y.clause.head) ||
            x.clause.body.size() != y.clause.body.size())
          return false;
        for (std::size_t k = 0; k < x.clause.body.size(); ++k)
          if (!node_eq(x.clause.body[k], y.clause.body[k])) return false;
        break;
    }
  }
  return true;
}

}  // namespace flg
