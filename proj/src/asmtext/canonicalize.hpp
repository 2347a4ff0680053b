#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asmtext/asm_parser.hpp"
#include "seamcode/lower.hpp"

namespace seam {

// One instruction after placeholder substitution. `tokens` contains operand
// tokens (with "," between operand groups, brackets and PTR retained); it
// never contains free-standing numbers, string labels, or symbolic targets.
// The concrete jump target and line metadata ride along for reassembly.
struct CanonicalInstruction {
  std::string mnemonic;
  std::vector<std::string> tokens;
  std::optional<bool> jump_up;  // branches only: true = target after the branch
  std::int64_t address = 0;
  std::optional<std::int64_t> jump_target;
  bool is_conditional = false;
  bool is_call = false;
  int line = 0;
};

struct CanonicalFunction {
  std::vector<CanonicalInstruction> insns;
  std::vector<SeamLiteral> literals;  // placeholder-order harvest (IMM/STR/FUNC)
};

// Applies the token substitutions: free immediates -> IMM, string-constant
// references -> STR (resolved through the string table), call targets -> FUNC,
// branch targets -> UP/DOWN by address comparison. Bracketed displacements and
// shift counts keep their numeric form (they identify slots, not data).
CanonicalFunction canonicalize(const std::vector<AsmInstruction>& insns,
                               const AsmStringTable& strings);

// "mnemonic tok tok , tok ..." — one instruction per line.
std::string canonical_line(const CanonicalInstruction& insn);
std::string canonical_text(const std::vector<CanonicalInstruction>& insns);
// Single-line form with " ; " between instructions (dedup keys, reports).
std::string canonical_flat(const std::vector<CanonicalInstruction>& insns);

// Re-tokenizes canonical_text output into instruction shells (no label
// resolution; UP/DOWN survive as-is). Supports the idempotence property.
std::vector<AsmInstruction> parse_canonical_lines(const std::string& text);

bool looks_numeric(const std::string& token);

// Returns offending tokens: numbers outside brackets and shift counts, label
// or quote tokens anywhere. Empty result == no literal leakage.
std::vector<std::string> leaked_literals(const std::vector<CanonicalInstruction>& insns);

// Substitutes the i-th IMM/STR placeholder in `tokens` with the i-th harvested
// literal of that kind. Surplus placeholders are listed in `diagnostics` and
// left in place.
std::vector<std::string> backfill(const std::vector<std::string>& tokens,
                                  const std::vector<SeamLiteral>& literals,
                                  std::vector<std::string>& diagnostics);

}  // namespace seam
