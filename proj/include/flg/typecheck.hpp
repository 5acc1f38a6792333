#pragma once

#include <string>
#include <vector>

#include "flg/ast.hpp"
#include "flg/diagnostics.hpp"

namespace flg {

enum class Mode { Exp, Smt };

// Γ ⊢_m τ with the given type variables in scope. Returns the name of the
// first violated rule, or an empty string when τ is well formed.
std::string type_well_formed(const Program& prog, const Type& t, Mode m,
                             const std::vector<Symbol>& tvars = {});

// Type of a constant (bool, bv[32], bv[64], string).
Type typeof_constant(const Value& k);

// Declarations, function bodies and clauses. Fills Expr::type / smt_index and
// completes the signatures of lifted local functions. Errors and warnings go
// to `diags`; returns false if any error was reported.
bool typecheck_program(Program& prog, Diagnostics& diags);

// Dependency graph and stratification (fills Program::strata).
bool validate_program(Program& prog, Diagnostics& diags);

// Query-specialisation slot of the pipeline; currently the identity.
void rewrite_program(Program& prog);

// Checks a closed expression (e.g. a fact-file field) against `expected`.
bool check_closed_expr(const Program& prog, Expr& e, const Type& expected,
                       Diagnostics& diags);

// Runtime typing of values, used to check Δ;Φ ⊨ W.
bool value_has_type(const Program& prog, const Value& v, const Type& t);

// SMT sort (an erased pre-type) of a formula value, or null if ill-sorted.
Type formula_sort(const Program& prog, const Value& v);

}  // namespace flg
