#pragma once

#include <string>
#include <string_view>

#include "cogent/ast.hpp"

namespace cogent {

/// Parses core-syntax source (`.cogc`). Throws Error with ParseError,
/// DuplicateDefinition, DuplicateBinder, DuplicateConstructor, DuplicateField
/// or UnboundTypeVariable.
Program parse_program(std::string_view text);

/// Parses a single type. Type variables are accepted unchecked.
TypeRef parse_type(std::string_view text);

/// Parses a single expression (no scoping checks).
ExprRef parse_expr(std::string_view text);

std::string print_program(const Program& p);
std::string print_expr(const Expr& e);

}  // namespace cogent
