#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "flg/ast.hpp"
#include "flg/substitution.hpp"
#include "flg/world.hpp"

namespace flg {

class SmtSolver;

// ---- unification ---------------------------------------------------------------

// θ ⊢ u ≈ v: `v` is ground. Binds the unbound variables of `u`; false on
// a mismatch (θ may hold partial bindings then; callers rewind).
bool unify_value(Substitution& theta, const Term& u, const Value& v);
// θ ⊢ u1 ≈ u2: one side must be ground under θ, otherwise RuntimeError
// "uu-FF". Constructor clashes are plain failures.
bool unify_terms(Substitution& theta, const Term& u1, const Term& u2);

// ---- evaluation ----------------------------------------------------------------

enum class ErrorMode { Hard, Soft };

struct EngineOptions {
  int workers = 1;
  ErrorMode mode = ErrorMode::Hard;
  bool semi_naive = true;
  bool check_types = false;  // check every new tuple against its declared types
  int max_iterations = 10000;
  int max_call_depth = 100000;
  // Observer called once each stratum reaches its fixed point.
  std::function<void(const Stratum&, const World&)> after_stratum;
};

struct StratumStats {
  std::vector<Symbol> relations;
  int iterations = 0;
  std::uint64_t derivations = 0;  // head instances produced, duplicates included
  std::uint64_t new_tuples = 0;
};

struct EngineStats {
  std::vector<StratumStats> strata;
  std::uint64_t soft_drops = 0;  // derivation paths dropped in soft mode
};

// Converts a value to the formula it denotes: constants become smt_const,
// constructor trees become SMT constructor applications annotated with their
// (erased) ADT types. `type` may be null when unknown.
Value to_smt_value(const Program& prog, const Value& v, const Type& type);

class Engine {
 public:
  Engine(const Program& prog, SmtSolver* smt, EngineOptions opts = {});

  // Runs every stratum in order on top of `world`, which holds the input
  // facts. Throws RuntimeError on a hard error.
  void run(World& world);

  // Evaluates a closed expression against `world` (fact files, tests).
  Value eval_closed(const Expr& e, const World& world);

  // One naive pass of a clause over `world`: all head tuples it derives.
  // Builds whatever indices the clause's atoms need first.
  std::vector<Tuple> apply_clause(const Clause& c, World& world);

  const EngineStats& stats() const { return stats_; }

 private:
  void run_stratum(const Stratum& s, World& world);
  void check_stratum(const Stratum& s, const World& world);

  const Program& prog_;
  SmtSolver* smt_;
  EngineOptions opts_;
  EngineStats stats_;
};

}  // namespace flg
