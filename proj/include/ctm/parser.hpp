#pragma once

#include <string>
#include <string_view>

#include "ctm/ast.hpp"

namespace ctm {

/// Parses one Java compilation unit. Generic type arguments are erased,
/// annotations are skipped, lambda and anonymous-class bodies are kept for
/// scanning. Throws SyntaxError with the offending token's position.
CompilationUnit parse_source(std::string_view text, const std::string& path);

/// Parses a standalone Java expression (used for re-parsing stored
/// expression texts and for `predict`). Throws SyntaxError.
Expr parse_expression(std::string_view text);

}  // namespace ctm
