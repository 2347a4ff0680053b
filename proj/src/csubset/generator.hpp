#pragma once

#include <cstdint>
#include <string>

#include "csubset/ast.hpp"

namespace seam {

// The four statement families the corpus is stratified over.
enum class StmtKind { Expression, If, While, Call };

const char* stmt_kind_name(StmtKind kind);
StmtKind stmt_kind_from_name(const std::string& name);

// Operand complexity of the generated statements:
//   level 0  -> var (+) var        (single operation over leaves)
//   level 1  -> var (+) exp        (one side is a subtree)
//   level 2  -> exp (+) exp        (both sides are subtrees)
struct GenSpec {
  StmtKind kind = StmtKind::Expression;
  int level = 0;                  // 0..2
  std::uint64_t seed = 0;
  int statement_count = 1;        // top-level statements of `kind` (>= 1)
  bool allow_unsigned = false;    // unsigned stays opt-in; see README notes
  std::string function_name = "main";
};

// Deterministic: identical spec => identical function. Guarantees the subset
// contract (validated before returning): declarations precede any use and
// cover exactly the referenced variables, constant divisors are nonzero,
// expression depth stays within 5, and the function ends with a return.
Function gen_random_program(const GenSpec& spec);

}  // namespace seam
