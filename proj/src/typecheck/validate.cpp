#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "flg/typecheck.hpp"

namespace flg {
namespace {

struct Edge {
  Symbol to;
  bool negative;
  const Clause* via;
};

// Relations queried by an expression, directly or through called functions.
class Reach {
 public:
  explicit Reach(const Program& p) : p_(p) {}

  void expr(const Expr& e, std::set<Symbol>& rels, std::set<Symbol>& funs) {
    if (e.kind == ExprKind::RelQuery) rels.insert(e.name);
    if (e.kind == ExprKind::Call && funs.insert(e.name).second) {
      const FunDecl* f = p_.fun(e.name);
      if (f && f->body) expr(*f->body, rels, funs);
    }
    for (const auto& a : e.args)
      if (a) expr(*a, rels, funs);
    for (const auto& c : e.cases) expr(*c.body, rels, funs);
  }

 private:
  const Program& p_;
};

}  // namespace

bool validate_program(Program& prog, Diagnostics& diags) {
  std::map<Symbol, std::vector<Edge>> g;
  Reach reach(prog);
  for (Symbol r : prog.rel_order) g[r];
  for (const auto& c : prog.clauses) {
    auto& out = g[c.head];
    for (const auto& pr : c.body) {
      switch (pr.kind) {
        case PremiseKind::PosAtom: out.push_back({pr.rel, false, &c}); break;
        case PremiseKind::NegAtom: out.push_back({pr.rel, true, &c}); break;
        default: {
          std::set<Symbol> rels, funs;
          reach.expr(*pr.expr, rels, funs);
          for (Symbol r : rels) out.push_back({r, true, &c});
        }
      }
    }
  }

  // Tarjan; an SCC is emitted only after everything it depends on.
  std::map<Symbol, int> index, low;
  std::set<Symbol> on_stack;
  std::vector<Symbol> stack;
  std::vector<std::vector<Symbol>> sccs;
  int counter = 0;
  std::function<void(Symbol)> strong = [&](Symbol v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& e : g[v]) {
      if (!index.count(e.to)) {
        strong(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack.count(e.to)) {
        low[v] = std::min(low[v], index[e.to]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<Symbol> comp;
      Symbol w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != v);
      sccs.push_back(std::move(comp));
    }
  };
  for (Symbol r : prog.rel_order)
    if (!index.count(r)) strong(r);

  std::map<Symbol, int> comp_of;
  for (std::size_t i = 0; i < sccs.size(); ++i)
    for (Symbol r : sccs[i]) comp_of[r] = static_cast<int>(i);

  bool ok = true;
  prog.strata.clear();
  for (std::size_t i = 0; i < sccs.size(); ++i) {
    Stratum s;
    std::set<Symbol> members(sccs[i].begin(), sccs[i].end());
    for (Symbol r : prog.rel_order)
      if (members.count(r)) s.relations.push_back(r);
    for (Symbol u : s.relations) {
      for (const auto& e : g[u]) {
        if (!members.count(e.to)) continue;
        s.recursive = true;
        if (!e.negative || !ok) continue;
        // Path e.to ->* u inside the component closes the cycle.
        std::map<Symbol, Symbol> prev;
        std::vector<Symbol> frontier{e.to};
        prev[e.to] = e.to;
        while (!frontier.empty() && !prev.count(u)) {
          std::vector<Symbol> next;
          for (Symbol x : frontier)
            for (const auto& f : g[x])
              if (members.count(f.to) && !prev.count(f.to)) {
                prev[f.to] = x;
                next.push_back(f.to);
              }
          frontier = std::move(next);
        }
        std::vector<Symbol> path{u};
        for (Symbol x = u; x != e.to;) {
          x = prev[x];
          path.push_back(x);
        }
        // path runs u <- ... <- e.to; print as dependency chain u -> e.to -> ... -> u
        std::string cyc = u.str() + " -> " + e.to.str();
        for (std::size_t k = path.size() - 1; k-- > 0;) cyc += " -> " + path[k].str();
        if (e.to == u) cyc = u.str() + " -> " + u.str();
        diags.error(e.via->span, "prog-WF",
                    "program is not stratifiable: " + u.str() +
                        " depends negatively on " + e.to.str() +
                        " (through negation or a relation used as a function) in the cycle " + cyc);
        ok = false;
      }
    }
    for (std::size_t k = 0; k < prog.clauses.size(); ++k)
      if (members.count(prog.clauses[k].head)) s.clauses.push_back(static_cast<int>(k));
    prog.strata.push_back(std::move(s));
  }
  if (!ok) prog.strata.clear();
  return ok;
}

}  // namespace flg
