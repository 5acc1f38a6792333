// Memoizing solver front end, reply/model parsing and the five operators.

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "flg/engine.hpp"
#include "flg/smt.hpp"
#include "smt/sexpr.hpp"

namespace flg {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

SmtReply parse_reply(const std::string& raw, bool want_model) {
  std::size_t n = sexpr::complete_prefix(raw + "\n");
  if (n == std::string::npos) throw RuntimeError("smt-protocol", "empty solver reply");
  std::string head = raw.substr(0, n);
  head.erase(0, head.find_first_not_of(" \t\r\n"));
  SmtReply r;
  if (head == "sat") r.verdict = Verdict::Sat;
  else if (head == "unsat") r.verdict = Verdict::Unsat;
  else if (head == "unknown") r.verdict = Verdict::Unknown;
  else throw RuntimeError("smt-protocol", "unexpected solver reply: " + raw.substr(0, 200));
  if (want_model && r.verdict == Verdict::Sat) {
    std::string rest = raw.substr(std::min(n, raw.size()));
    std::size_t b = rest.find_first_not_of(" \t\r\n");
    if (b != std::string::npos && rest.compare(b, 6, "(error") != 0) r.model = rest.substr(b);
  }
  return r;
}

namespace {

using sexpr::Node;

struct Decoder {
  const Program& prog;
  std::map<std::string, Symbol> ctor_by_name;

  explicit Decoder(const Program& p) : prog(p) {
    for (const auto& [c, _] : p.ctors) {
      std::string n = c.str();
      // Mirror the serializer's renaming of reserved names.
      ctor_by_name[n] = c;
      ctor_by_name[n + "!u"] = c;
    }
  }

  std::optional<std::uint64_t> bits(const Node& n, int width) {
    if (n.kind == Node::Kind::Atom) {
      const std::string& t = n.text;
      if (t.rfind("#x", 0) == 0) return std::stoull(t.substr(2), nullptr, 16);
      if (t.rfind("#b", 0) == 0) return std::stoull(t.substr(2), nullptr, 2);
      return std::nullopt;
    }
    // (_ bvN w)
    if (n.items.size() == 3 && n.items[0].is_atom("_") && n.items[1].text.rfind("bv", 0) == 0 &&
        n.items[2].text == std::to_string(width))
      return std::stoull(n.items[1].text.substr(2));
    return std::nullopt;
  }

  std::optional<Value> value(const Node& n, const Type& t) {
    switch (t->kind) {
      case TypeKind::Bool:
        if (n.is_atom("true")) return mk_bool(true);
        if (n.is_atom("false")) return mk_bool(false);
        return std::nullopt;
      case TypeKind::BitVec: {
        auto b = bits(n, t->width);
        if (!b) return std::nullopt;
        return mk_bv(t->width, *b);  // two's complement: the payload is the bit pattern
      }
      case TypeKind::String:
        if (n.kind == Node::Kind::String) return mk_string(n.text);
        return std::nullopt;
      case TypeKind::Adt: return adt(n, t);
      default: return std::nullopt;
    }
  }

  std::optional<Symbol> ctor_head(const Node& n) {
    const Node* h = &n;
    if (n.is_list() && n.items.size() == 3 && n.items[0].is_atom("as")) h = &n.items[1];
    if (h->kind != Node::Kind::Atom) return std::nullopt;
    auto it = ctor_by_name.find(h->text);
    if (it == ctor_by_name.end()) return std::nullopt;
    return it->second;
  }

  std::optional<Value> adt(const Node& n, const Type& t) {
    const AdtDecl* ad = prog.adt(t->name);
    if (!ad || ad->uninterpreted_sort) return std::nullopt;
    const Node* head = &n;
    std::vector<const Node*> args;
    if (n.is_list() && !n.items.empty() && !n.items[0].is_atom("as")) {
      head = &n.items[0];
      for (std::size_t i = 1; i < n.items.size(); ++i) args.push_back(&n.items[i]);
    }
    auto c = ctor_head(*head);
    if (!c) return std::nullopt;
    const CtorDecl& cd = prog.ctors.at(*c);
    if (cd.adt != t->name || cd.args.size() != args.size()) return std::nullopt;
    std::map<Symbol, Type> inst;
    for (std::size_t i = 0; i < ad->params.size() && i < t->args.size(); ++i) inst[ad->params[i]] = t->args[i];
    std::vector<Value> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
      Type decl = substitute_params(cd.args[i], inst);
      if (decl->kind == TypeKind::Sym) return std::nullopt;
      auto v = value(*args[i], erase_type(decl));
      if (!v) return std::nullopt;
      if (decl->kind == TypeKind::Smt) v = to_smt_value(prog, *v, erase_type(decl));
      out.push_back(*v);
    }
    return mk_ctor(*c, std::move(out));
  }
};

}  // namespace

std::shared_ptr<const SmtModel> parse_model(const Program& prog, const std::string& text,
                                            const std::vector<std::pair<std::string, Term>>& vars) {
  auto model = std::make_shared<SmtModel>();
  std::vector<Node> top;
  try {
    top = sexpr::parse_all(text);
  } catch (const std::exception& e) {
    throw RuntimeError("smt-protocol", std::string("unreadable model: ") + e.what());
  }
  if (top.empty() || !top[0].is_list()) return model;
  const Node& m = top[0];
  std::map<std::string, Term> by_name(vars.begin(), vars.end());
  Decoder dec(prog);
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    const Node& d = m.items[i];
    if (d.is_atom("model")) continue;
    if (!d.is_list() || d.items.size() != 5 || !d.items[0].is_atom("define-fun")) continue;
    if (!d.items[2].is_list() || !d.items[2].items.empty()) continue;  // functions are not reported
    auto it = by_name.find(d.items[1].text);
    if (it == by_name.end()) continue;
    const Term& var = it->second;
    if (!var->type) continue;
    try {
      if (auto v = dec.value(d.items[4], var->type)) model->entries.emplace_back(var, *v);
    } catch (const std::exception&) {
      // unrepresentable value: leave the variable unassigned
    }
  }
  model->normalize();
  return model;
}

SmtSolver::SmtSolver(const Program& prog, std::unique_ptr<SmtBackend> backend, SmtOptions opts)
    : prog_(prog), ser_(prog), backend_(std::move(backend)), opts_(std::move(opts)) {
  if (!opts_.dump_dir.empty()) std::filesystem::create_directories(opts_.dump_dir);
}

std::vector<std::string> SmtSolver::take_warnings() {
  std::lock_guard<std::mutex> lock(mu_);
  return std::exchange(warnings_, {});
}

SmtAnswer SmtSolver::check(const std::vector<Value>& assertions, bool want_model,
                           std::optional<std::int64_t> timeout_ms) {
  if (!timeout_ms) timeout_ms = opts_.default_timeout_ms;
  std::vector<std::string> warns;
  SmtScript script = ser_.serialize(assertions, want_model, timeout_ms, &warns);

  std::promise<SmtAnswer> promise;
  std::shared_future<SmtAnswer> fut;
  bool mine = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& w : warns)
      if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(w);
    auto it = memo_.find(script.key);
    if (it != memo_.end()) {
      fut = it->second;
      ++memo_hits_;
    } else {
      fut = promise.get_future().share();
      memo_.emplace(script.key, fut);
      mine = true;
    }
  }
  if (mine) {
    try {
      ++dispatches_;
      if (!opts_.dump_dir.empty()) {
        std::ofstream out(std::filesystem::path(opts_.dump_dir) / (hex16(script.content) + ".smt2"));
        out << script.text;
      }
      SmtReply reply = parse_reply(backend_->dispatch(script), want_model);
      SmtAnswer ans;
      ans.verdict = reply.verdict;
      if (want_model && reply.verdict == Verdict::Sat)
        ans.model = parse_model(prog_, reply.model, script.vars);
      promise.set_value(std::move(ans));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return fut.get();
}

namespace {

std::vector<Value> list_elems(const Value& l) {
  std::vector<Value> out;
  const TermNode* n = l.get();
  while (n->kind == TermKind::Ctor && n->sym == names::cons() && n->args.size() == 2) {
    out.push_back(n->args[0]);
    n = n->args[1].get();
  }
  return out;
}

std::optional<std::int64_t> timeout_arg(const Value& opt) {
  if (opt->kind == TermKind::Ctor && opt->sym == names::some()) {
    std::int64_t n = bv_signed(opt->args[0]);
    if (n <= 0)
      throw RuntimeError("op-domain", "solver timeout must be positive, got " + std::to_string(n));
    return n;
  }
  return std::nullopt;
}

}  // namespace

bool smt_is_sat(SmtSolver& s, const Value& phi) {
  SmtAnswer a = s.check({phi}, false, std::nullopt);
  if (a.verdict == Verdict::Unknown)
    throw RuntimeError("smt-unknown", "is_sat: the solver answered unknown");
  return a.verdict == Verdict::Sat;
}

bool smt_is_valid(SmtSolver& s, const Value& phi) {
  SmtAnswer a = s.check({mk_smt(SmtOp::Not, {phi})}, false, std::nullopt);
  if (a.verdict == Verdict::Unknown)
    throw RuntimeError("smt-unknown", "is_valid: the solver answered unknown");
  return a.verdict == Verdict::Unsat;
}

Value smt_is_sat_opt(SmtSolver& s, const Value& formulas, const Value& timeout) {
  SmtAnswer a = s.check(list_elems(formulas), false, timeout_arg(timeout));
  if (a.verdict == Verdict::Unknown) return mk_ctor(names::none());
  return mk_ctor(names::some(), {mk_bool(a.verdict == Verdict::Sat)});
}

Value smt_get_model(SmtSolver& s, const Value& formulas, const Value& timeout) {
  SmtAnswer a = s.check(list_elems(formulas), true, timeout_arg(timeout));
  if (a.verdict != Verdict::Sat || !a.model) return mk_ctor(names::none());
  return mk_ctor(names::some(), {mk_model(a.model)});
}

Value smt_query_model(const Value& var, const Value& model) {
  if (model->kind != TermKind::Model || !model->model) return mk_ctor(names::none());
  if (auto v = model->model->lookup(var)) return mk_ctor(names::some(), {*v});
  return mk_ctor(names::none());
}

}  // namespace flg
