#pragma once

#include <map>
#include <string>
#include <vector>

#include "csubset/ast.hpp"

namespace seam {

// Statements are numbered in pre-order (an if's id precedes its branches').
// The layout records which printed line every statement landed on; the
// reference code generator replays the same numbering so its line metadata
// agrees with the printed source byte for byte.
struct LineLayout {
  int header_line = 0;               // `int name() {`
  std::vector<int> stmt_line;        // statement id -> line number
  std::map<int, int> else_line;      // if id -> `} else {` line
  std::map<int, int> close_line;     // if/while id -> closing `}` line
  int footer_line = 0;               // final `}`
};

struct PrintedFunction {
  std::string text;
  LineLayout layout;
};

// Deterministic formatting: 4-space indents, one statement per line, always
// braced bodies, parenthesization that reparses to the identical AST.
PrintedFunction print_function_with_layout(const Function& fn, int first_line = 1);
std::string print_function(const Function& fn);
std::string print_c(const Program& program);

// Expression-only rendering (used in reports and diagnostics).
std::string print_expression(const AstNode& expr);

}  // namespace seam
