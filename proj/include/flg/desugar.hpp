#pragma once

#include <vector>

#include "flg/ast.hpp"
#include "flg/surface.hpp"

namespace flg {

// Resolves names and types and expands all surface conveniences:
//   - `#id[t]` becomes `#{"id"}[t]`;
//   - records become a one-constructor data type `%rec_<name>` plus one getter
//     function per field; `{ e with f = x }` rebuilds through the getters;
//   - `let fun` is lifted to a top-level function taking its captured
//     variables as extra parameters;
//   - inside quotes, variables, constants and function calls become explicit
//     unquotes and constructors become formula constructors;
//   - clause bodies are normalised so atoms take only variables and each
//     equation binds one variable (fresh names use the reserved `%V` prefix).
// The sources are processed in order, as if concatenated.
Program desugar(const std::vector<SourceProgram>& sources, Diagnostics& diags);

// Resolves a closed expression-mode expression (e.g. a fact-file field)
// against a finished program. Reports problems to `diags`; returns null then.
ExprPtr resolve_closed(const Program& prog, const SNode& n, Diagnostics& diags);

// Resolves a type expression against the program's declarations.
Type resolve_type_closed(const Program& prog, const SType& t, Diagnostics& diags);

}  // namespace flg
