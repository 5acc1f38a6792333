#pragma once

#include <string>
#include <string_view>

#include "flg/surface.hpp"

namespace flg {

// Throws DiagnosticError (rule "syntax") with the position and the set of
// expected tokens.
SourceProgram parse_program(std::string_view text, const std::string& path = "");

// A single closed expression, as found in a fact-file field.
SNodePtr parse_expression(std::string_view text, const std::string& path = "",
                          int line = 1);

// Printer over the parse tree; its output reparses to an equal tree.
std::string print_source(const SourceProgram& p);
std::string print_node(const SNode& n);
std::string print_type(const SType& t);

// Structural equality ignoring source spans.
bool surface_equal(const SourceProgram& a, const SourceProgram& b);
bool surface_equal(const SNode& a, const SNode& b);

}  // namespace flg
