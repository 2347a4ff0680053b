#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seam {

// One parsed instruction. `address` is a byte offset assigned sequentially
// within the function (every instruction counts as one byte; only relative
// order matters for jump-direction decisions).
struct AsmInstruction {
  std::int64_t address = 0;
  std::string mnemonic;
  std::vector<std::string> operands;  // split on commas/spaces; '[' ']' kept as tokens
  std::vector<int> group_lens;        // token count of each comma-separated operand
  std::string raw;                    // original text, trimmed
  int line = 0;                       // source line from the nearest .loc, 0 if none
  std::optional<std::int64_t> jump_target;  // resolved target address for branches
  bool is_jump = false;
  bool is_conditional = false;
  bool is_call = false;
};

struct AsmFunction {
  std::string name;
  std::vector<AsmInstruction> insns;
};

// String constants collected from .string/.ascii directives, keyed by the
// label that precedes them (e.g. ".LC0" -> "\"You Win!\"").
struct AsmStringTable {
  std::vector<std::pair<std::string, std::string>> entries;
  const std::string* find(const std::string& label) const;
};

struct ParsedAsm {
  std::vector<AsmFunction> functions;
  AsmStringTable strings;
};

// Parses compiler-style Intel-syntax assembly text: tracks sections so debug
// sections are skipped, attaches .loc line numbers, resolves local labels to
// the address of the next instruction, and classifies branches/calls.
ParsedAsm parse_asm(const std::string& text);

// Operand tokenizer shared with canonicalization: splits on spaces and commas,
// keeps '[' and ']' as standalone tokens, splits '+'/'-' inside brackets.
// Commas themselves come back as "," tokens so group structure is recoverable.
std::vector<std::string> tokenize_operands(const std::string& text);

// Drops "," tokens, recording each comma-separated group's token count.
void split_operand_groups(const std::vector<std::string>& with_commas,
                          std::vector<std::string>& operands, std::vector<int>& group_lens);

bool is_register_token(const std::string& token);

// Maps any register alias to its family name (eax/ax/al/rax -> rax). Returns
// the token unchanged if it is not a register.
std::string register_family(const std::string& token);

}  // namespace seam
