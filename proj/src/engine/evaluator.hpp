#pragma once

// Per-thread evaluation state shared by the expression evaluator and the
// clause runner. Not thread-safe: each worker owns one.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flg/ast.hpp"
#include "flg/engine.hpp"
#include "flg/substitution.hpp"
#include "flg/world.hpp"

namespace flg::detail {

class Evaluator {
 public:
  Evaluator(const Program& prog, const World& world, SmtSolver* smt, int max_depth)
      : prog_(prog), world_(world), smt_(smt), max_depth_(max_depth) {}

  // Rule variables visible to expressions (premises, heads).
  void set_theta(const Substitution* theta) { theta_ = theta; }

  Value eval(const Expr& e);
  Value formula(const Expr& f);

  // Right-hand side of an equation premise as a unifiable term: sub-terms
  // that are ground under θ are evaluated, unbound variables stay variables.
  Term pattern_term(const Expr& e, bool in_formula);
  bool ground(const Expr& e) const;

 private:
  const Value* lookup(Symbol x) const;
  bool match(const Pattern& p, const Value& v);
  Value call(const Expr& e);
  Value op(const Expr& e);
  Value query(const Expr& e);
  Value smt_op(const Expr& e, const std::vector<Value>& args);
  [[noreturn]] void fail(const Expr& at, const char* rule, const std::string& msg) const;

  const Program& prog_;
  const World& world_;
  SmtSolver* smt_;
  int max_depth_;
  int depth_ = 0;
  const Substitution* theta_ = nullptr;
  std::vector<std::pair<Symbol, Value>> locals_;
  std::size_t base_ = 0;  // first local of the current function frame
};

// Evaluation of clause bodies against views of the world.
struct AtomView {
  std::size_t lo = 0, hi = SIZE_MAX;  // row range of the atom's relation
};

class ClauseRunner {
 public:
  ClauseRunner(const Program& prog, const World& world, SmtSolver* smt, const EngineOptions& opts)
      : ev_(prog, world, smt, opts.max_call_depth), world_(world), soft_(opts.mode == ErrorMode::Soft) {}

  // Enumerates derivations of `c`. `views[i]` restricts premise i when it is
  // a positive atom. Head tuples are appended to `out`.
  void run(const Clause& c, const std::vector<AtomView>& views, std::vector<Tuple>& out);

  std::uint64_t derivations = 0;
  std::uint64_t soft_drops = 0;

  Evaluator& evaluator() { return ev_; }

 private:
  void step(std::size_t i);
  void premise(std::size_t i);

  Evaluator ev_;
  const World& world_;
  bool soft_;
  const Clause* clause_ = nullptr;
  const std::vector<AtomView>* views_ = nullptr;
  std::vector<Tuple>* out_ = nullptr;
  Substitution theta_;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace flg::detail
