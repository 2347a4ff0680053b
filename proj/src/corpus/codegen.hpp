#pragma once

#include <string>

#include "csubset/ast.hpp"

namespace seam {

// Reference x86-64 backend. Emits unoptimized, GAS Intel-syntax assembly with
// one `.loc` marker per statement, so instruction groups line up one-to-one
// with the IL's translation view:
//   - locals get rbp-relative slots in declaration order (4/8 bytes, aligned);
//   - expressions evaluate left to right through rax, spilling the left
//     operand across the right's evaluation, so literal operands surface in
//     the same order the IL records them;
//   - shift counts travel through cl and divisions through rcx, keeping every
//     source constant a free (placeholder-able) immediate;
//   - an if's taken-arm exit jump is emitted without a new line marker and
//     rides the preceding statement's group, while a while's loop-back jump
//     gets the closing brace's line and forms the block-END group;
//   - call arguments are pushed left to right, then popped into the argument
//     registers; string arguments push rodata label addresses.
std::string reference_codegen(const Program& program);

}  // namespace seam
