#pragma once

#include <string>
#include <vector>

#include "csubset/ast.hpp"
#include "seamcode/normalize.hpp"
#include "seamcode/tokens.hpp"

namespace seam {

enum class LiteralKind { Imm, Str, Func };

const char* literal_kind_name(LiteralKind kind);

struct SeamLiteral {
  LiteralKind kind;
  std::string text;  // IMM: decimal digits; STR: quoted escaped form; FUNC: name
};

// Lowered form of one function. `lines` is the complete IL — declarations,
// block headers, ELSE/END markers — and round-trips through `lift`.
// `literals` holds the IMM/STR texts in emission order (placeholder
// conservation: one entry per IMM/STR token in `lines`). Callee names live in
// the renaming map, mirroring how the assembly side harvests call targets.
struct LoweredFunction {
  std::vector<SeamLine> lines;
  std::vector<SeamLiteral> literals;
  RenamingMap renaming;
};

LoweredFunction lower_ast(const Function& fn);

// The subset of lines a translator is trained against: exactly those that own
// an instruction group in -O0 code. DECL lines emit nothing, the END of an if
// owns no code, and the then-arm's exit jump is folded into the preceding
// statement's group, so ELSE owns none either; all three are reconstructed
// from slot metadata and jump targets at decompile time. Kept: ASSIGN, CALL,
// RET, IF, WHILE, and the END that closes a WHILE (the loop-back jump).
std::vector<SeamLine> translation_view(const std::vector<SeamLine>& lines);

}  // namespace seam
