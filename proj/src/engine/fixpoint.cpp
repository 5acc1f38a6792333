// Clause application and the stratified fixpoints (naive and semi-naive).

#include <pthread.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <functional>
#include <optional>
#include <set>

#include "engine/evaluator.hpp"
#include "flg/typecheck.hpp"

namespace flg {
namespace detail {

void ClauseRunner::run(const Clause& c, const std::vector<AtomView>& views,
                       std::vector<Tuple>& out) {
  clause_ = &c;
  views_ = &views;
  out_ = &out;
  theta_.rewind(0);
  ev_.set_theta(&theta_);
  step(0);
}

void ClauseRunner::step(std::size_t i) {
  const Clause& c = *clause_;
  if (i == c.body.size()) {
    Tuple t;
    t.reserve(c.head_vars.size());
    for (Symbol x : c.head_vars) {
      const Value* v = theta_.find(x);
      if (!v) throw RuntimeError("H-Clause", "head variable " + x.str() + " is unbound", c.span);
      t.push_back(*v);
    }
    ++derivations;
    const Relation* r = world_.find(c.head);
    if (!r || !r->contains(t)) out_->push_back(std::move(t));
    return;
  }
  premise(i);
}

void ClauseRunner::premise(std::size_t i) {
  const Premise& p = clause_->body[i];
  const std::size_t mark = theta_.mark();

  if (p.kind == PremiseKind::PosAtom) {
    const Relation* r = world_.find(p.rel);
    if (!r) return;
    const AtomView& view = (*views_)[i];
    const std::size_t lo = view.lo, hi = std::min(view.hi, r->size());
    if (lo >= hi) return;
    const std::size_t n = p.vars.size();
    Tuple key(n);
    std::uint32_t mask = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (const Value* v = theta_.find(p.vars[k])) {
        key[k] = *v;
        mask |= 1u << k;
      }
    auto try_row = [&](const Tuple& row) {
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k) {
        if (const Value* v = theta_.find(p.vars[k]))
          ok = term_equal(*v, row[k]);
        else
          theta_.bind(p.vars[k], row[k]);
      }
      if (ok) step(i + 1);
      theta_.rewind(mark);
    };
    if (mask) {
      // Each recursion level needs its own candidate list.
      std::vector<std::uint32_t> rows;
      r->probe(mask, key, lo, hi, rows);
      for (std::uint32_t row : rows) try_row(r->row(row));
    } else {
      for (std::size_t row = lo; row < hi; ++row) try_row(r->row(row));
    }
    return;
  }

  bool proceed = false;
  try {
    switch (p.kind) {
      case PremiseKind::NegAtom: {
        Tuple t;
        for (Symbol x : p.vars) {
          const Value* v = theta_.find(x);
          if (!v) throw RuntimeError("NegAtom-E", "variable " + x.str() + " of a negated atom is unbound");
          t.push_back(*v);
        }
        const Relation* r = world_.find(p.rel);
        proceed = !(r && r->contains(t));
        break;
      }
      case PremiseKind::Eq: {
        if (ev_.ground(*p.expr)) {
          Value v = ev_.eval(*p.expr);
          if (const Value* y = theta_.find(p.var)) {
            proceed = term_equal(*y, v);
          } else {
            theta_.bind(p.var, std::move(v));
            proceed = true;
          }
        } else {
          Term u = ev_.pattern_term(*p.expr, false);
          proceed = unify_terms(theta_, mk_var(p.var), u);
        }
        break;
      }
      case PremiseKind::NegEq: {
        const Value* y = theta_.find(p.var);
        if (!y) throw RuntimeError("NegExpr-E", "variable " + p.var.str() + " of a disequation is unbound");
        if (!ev_.ground(*p.expr))
          throw RuntimeError("NegExpr-E", "right-hand side of a disequation is not ground");
        proceed = !term_equal(*y, ev_.eval(*p.expr));
        break;
      }
      case PremiseKind::PosAtom: break;
    }
  } catch (RuntimeError& err) {
    theta_.rewind(mark);
    if (err.span.line == 0) err.span = p.span;
    if (!soft_) throw;
    ++soft_drops;
    return;
  }
  if (proceed) step(i + 1);
  theta_.rewind(mark);
}

}  // namespace detail

namespace {

using detail::AtomView;
using detail::ClauseRunner;

constexpr std::size_t kChunk = 512;
constexpr std::size_t kStack = std::size_t{512} << 20;

// Runs fn(worker) on `n` threads with generous stacks (ML code may recurse deeply).
void on_threads(int n, const std::function<void(int)>& fn) {
  struct Arg {
    const std::function<void(int)>* fn;
    int id;
  };
  std::vector<pthread_t> ids(static_cast<std::size_t>(n));
  std::vector<Arg> args(static_cast<std::size_t>(n));
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStack);
  for (int i = 0; i < n; ++i) {
    args[static_cast<std::size_t>(i)] = {&fn, i};
    int rc = pthread_create(
        &ids[static_cast<std::size_t>(i)], &attr,
        [](void* p) -> void* {
          auto* a = static_cast<Arg*>(p);
          (*a->fn)(a->id);
          return nullptr;
        },
        &args[static_cast<std::size_t>(i)]);
    if (rc != 0) throw std::runtime_error(std::string("pthread_create: ") + std::strerror(rc));
  }
  pthread_attr_destroy(&attr);
  for (auto& t : ids) pthread_join(t, nullptr);
}

struct Task {
  const Clause* clause;
  std::vector<AtomView> views;
};

struct TaskResult {
  std::vector<Tuple> tuples;
  std::optional<RuntimeError> error;
  std::string other_error;
};

// Bound-variable masks of each positive atom under left-to-right evaluation.
std::vector<std::uint32_t> atom_masks(const Clause& c) {
  std::set<Symbol> bound;
  std::vector<std::uint32_t> masks(c.body.size(), 0);
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    const Premise& p = c.body[i];
    if (p.kind == PremiseKind::PosAtom) {
      std::set<Symbol> seen;
      for (std::size_t k = 0; k < p.vars.size(); ++k)
        if (bound.count(p.vars[k])) masks[i] |= 1u << k;
      for (Symbol x : p.vars) bound.insert(x);
    } else if (p.kind == PremiseKind::Eq) {
      bound.insert(p.var);
      std::vector<Symbol> fv;
      free_vars(*p.expr, fv);
      bound.insert(fv.begin(), fv.end());
    }
  }
  return masks;
}

// Splits a task into chunks over its first premise when that is an atom.
void push_task(std::vector<Task>& tasks, const Clause& c, std::vector<AtomView> views,
               const World& world) {
  if (!c.body.empty() && c.body[0].kind == PremiseKind::PosAtom) {
    const Relation* r = world.find(c.body[0].rel);
    std::size_t lo = views[0].lo, hi = std::min(views[0].hi, r ? r->size() : 0);
    if (lo >= hi) return;
    for (std::size_t a = lo; a < hi; a += kChunk) {
      std::vector<AtomView> v = views;
      v[0] = {a, std::min(hi, a + kChunk)};
      tasks.push_back({&c, std::move(v)});
    }
    return;
  }
  tasks.push_back({&c, std::move(views)});
}

}  // namespace

Engine::Engine(const Program& prog, SmtSolver* smt, EngineOptions opts)
    : prog_(prog), smt_(smt), opts_(opts) {
  if (opts_.workers < 1) opts_.workers = 1;
}

Value Engine::eval_closed(const Expr& e, const World& world) {
  detail::Evaluator ev(prog_, world, smt_, opts_.max_call_depth);
  std::optional<Value> out;
  std::optional<RuntimeError> err;
  on_threads(1, [&](int) {
    try {
      out = ev.eval(e);
    } catch (const RuntimeError& x) {
      err = x;
    }
  });
  if (err) throw *err;
  return *out;
}

std::vector<Tuple> Engine::apply_clause(const Clause& c, World& world) {
  const auto masks = atom_masks(c);
  for (std::size_t i = 0; i < c.body.size(); ++i)
    if (masks[i]) world.relation(c.body[i].rel, static_cast<int>(c.body[i].vars.size())).ensure_index(masks[i]);
  std::vector<Tuple> out;
  std::optional<RuntimeError> err;
  on_threads(1, [&](int) {
    ClauseRunner cr(prog_, world, smt_, opts_);
    std::vector<AtomView> views(c.body.size());
    try {
      cr.run(c, views, out);
    } catch (const RuntimeError& x) {
      err = x;
    }
    stats_.soft_drops += cr.soft_drops;
  });
  if (err) throw *err;
  return out;
}

void Engine::run(World& world) {
  for (Symbol p : prog_.rel_order)
    world.relation(p, static_cast<int>(prog_.rels.at(p).types.size()));
  stats_ = {};
  for (const auto& s : prog_.strata) {
    run_stratum(s, world);
    if (opts_.check_types) check_stratum(s, world);
    if (opts_.after_stratum) opts_.after_stratum(s, world);
  }
}

void Engine::check_stratum(const Stratum& s, const World& world) {
  for (Symbol p : s.relations) {
    const RelDecl& rd = prog_.rels.at(p);
    const Relation* r = world.find(p);
    if (!r) continue;
    for (const auto& t : r->rows())
      for (std::size_t i = 0; i < t.size(); ++i)
        if (!value_has_type(prog_, t[i], rd.types[i]))
          throw RuntimeError("preservation", "tuple " + p.str() + " column " + std::to_string(i + 1) +
                                                 " holds " + to_source(t[i]) + ", not of type " +
                                                 type_to_string(rd.types[i]),
                             rd.span);
  }
}

void Engine::run_stratum(const Stratum& s, World& world) {
  const std::set<Symbol> members(s.relations.begin(), s.relations.end());
  StratumStats st;
  st.relations = s.relations;

  std::vector<const Clause*> clauses;
  for (int k : s.clauses) clauses.push_back(&prog_.clauses[static_cast<std::size_t>(k)]);
  std::vector<std::vector<std::uint32_t>> masks;
  for (const Clause* c : clauses) masks.push_back(atom_masks(*c));

  auto is_recursive = [&](const Clause& c) {
    for (const auto& p : c.body)
      if (p.kind == PremiseKind::PosAtom && members.count(p.rel)) return true;
    return false;
  };

  // Runs one iteration's tasks, then inserts their results in task order.
  auto iterate = [&](const std::vector<Task>& tasks) {
    if (++st.iterations > opts_.max_iterations)
      throw RuntimeError("iteration-bound",
                         "no fixpoint after " + std::to_string(opts_.max_iterations) +
                             " iterations of the stratum defining " + s.relations.front().str());
    for (std::size_t k = 0; k < clauses.size(); ++k)
      for (std::size_t i = 0; i < clauses[k]->body.size(); ++i)
        if (masks[k][i]) world.relation(clauses[k]->body[i].rel,
                                        static_cast<int>(clauses[k]->body[i].vars.size()))
                             .ensure_index(masks[k][i]);

    std::vector<TaskResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::atomic<std::uint64_t> derivations{0}, drops{0};
    const int n = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(opts_.workers), std::max<std::size_t>(tasks.size(), 1)));
    on_threads(n, [&](int) {
      ClauseRunner cr(prog_, world, smt_, opts_);
      for (;;) {
        std::size_t t = next.fetch_add(1);
        if (t >= tasks.size() || abort.load()) break;
        try {
          cr.run(*tasks[t].clause, tasks[t].views, results[t].tuples);
        } catch (const RuntimeError& e) {
          results[t].error = e;
          abort = true;
        } catch (const std::exception& e) {
          results[t].other_error = e.what();
          abort = true;
        }
      }
      derivations += cr.derivations;
      drops += cr.soft_drops;
    });
    st.derivations += derivations;
    stats_.soft_drops += drops;
    for (auto& r : results) {
      if (r.error) throw *r.error;
      if (!r.other_error.empty()) throw RuntimeError("internal", r.other_error);
    }
    std::uint64_t fresh = 0;
    for (auto& r : results)
      for (auto& t : r.tuples)
        if (world.insert(tasks[&r - results.data()].clause->head, std::move(t))) ++fresh;
    st.new_tuples += fresh;
    return fresh;
  };

  if (!opts_.semi_naive) {
    for (;;) {
      std::vector<Task> tasks;
      for (const Clause* c : clauses)
        push_task(tasks, *c, std::vector<AtomView>(c->body.size()), world);
      if (!iterate(tasks)) break;
    }
    stats_.strata.push_back(std::move(st));
    return;
  }

  // Non-recursive clauses run once against the full world; after that every
  // tuple of the stratum's relations counts as delta.
  {
    std::vector<Task> tasks;
    for (const Clause* c : clauses)
      if (!is_recursive(*c)) push_task(tasks, *c, std::vector<AtomView>(c->body.size()), world);
    iterate(tasks);
  }
  std::map<Symbol, std::size_t> old_end, cur_end;
  for (Symbol p : members) {
    old_end[p] = 0;
    cur_end[p] = world.size(p);
  }
  auto delta_nonempty = [&] {
    for (Symbol p : members)
      if (cur_end[p] > old_end[p]) return true;
    return false;
  };
  bool any_recursive = false;
  for (const Clause* c : clauses) any_recursive |= is_recursive(*c);

  while (any_recursive && delta_nonempty()) {
    std::vector<Task> tasks;
    for (const Clause* c : clauses) {
      std::vector<std::size_t> rec;
      for (std::size_t i = 0; i < c->body.size(); ++i)
        if (c->body[i].kind == PremiseKind::PosAtom && members.count(c->body[i].rel)) rec.push_back(i);
      for (std::size_t j = 0; j < rec.size(); ++j) {
        Symbol dj = c->body[rec[j]].rel;
        if (cur_end[dj] <= old_end[dj]) continue;
        std::vector<AtomView> views(c->body.size());
        for (std::size_t m = 0; m < rec.size(); ++m) {
          Symbol r = c->body[rec[m]].rel;
          if (m < j) views[rec[m]] = {0, old_end[r]};
          else if (m == j) views[rec[m]] = {old_end[r], cur_end[r]};
          else views[rec[m]] = {0, cur_end[r]};
        }
        push_task(tasks, *c, std::move(views), world);
      }
    }
    iterate(tasks);
    for (Symbol p : members) {
      old_end[p] = cur_end[p];
      cur_end[p] = world.size(p);
    }
  }
  stats_.strata.push_back(std::move(st));
}

}  // namespace flg
