#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csubset/ast.hpp"
#include "seamcode/lower.hpp"

namespace seam {

struct LiftOptions {
  // When set, v<k> tokens and FUNC placeholders are mapped back to their
  // original names; otherwise the normalized names are kept as identifiers.
  const RenamingMap* renaming = nullptr;
  std::string function_name = "FUNC";  // used when no renaming is supplied
};

struct LiftResult {
  Function fn;
  // Non-fatal degradations: missing literals (sentinel 0 / ""), surplus
  // harvested literals, unknown call names.
  std::vector<std::string> diagnostics;
};

// Inverse of lower_ast: reconstructs the AST from IL lines plus the literal
// list (positional, per placeholder kind). Structural damage — stack
// underflow, bad arity, unknown tokens, unclosed blocks — raises; literal
// count mismatches only degrade. The result is not validated against the
// subset scoping rules; callers that need that run validate_function.
LiftResult lift(const std::vector<SeamLine>& lines, const std::vector<SeamLiteral>& literals,
                const LiftOptions& options = {});

}  // namespace seam
