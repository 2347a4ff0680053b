#pragma once

#include <cstddef>
#include <vector>

#include "asmtext/asm_parser.hpp"

namespace seam {

// A maximal run of consecutive instructions sharing one source line. Debug
// line info only changes at statement starts, so these runs are exactly the
// per-statement instruction segments.
struct InsnGroup {
  int line = 0;
  std::size_t begin = 0;  // [begin, end) into the instruction vector
  std::size_t end = 0;
};

std::vector<InsnGroup> group_by_line(const std::vector<AsmInstruction>& insns);

// Function body with the frame-setup and frame-teardown groups removed: the
// first group carries the header line (push rbp / mov rbp, rsp / sub rsp),
// the last the closing brace (leave / ret). What remains maps 1:1 onto the
// statement-owned groups. Throws on functions too small to have a body or on
// instructions with no line info (samples without usable debug info are
// rejected upstream rather than silently mislabeled).
struct CoreBody {
  std::vector<AsmInstruction> insns;
  std::vector<InsnGroup> groups;  // rebased onto `insns`
  std::vector<int> boundary;      // per instruction: 1 = last of its group
};

CoreBody strip_frame(const std::vector<AsmInstruction>& insns);

// Shorthand for the label vector alone.
std::vector<int> label_boundaries(const std::vector<AsmInstruction>& insns);

}  // namespace seam
