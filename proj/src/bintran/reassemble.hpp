#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asmtext/canonicalize.hpp"
#include "seamcode/tokens.hpp"

namespace seam {

// Instruction ranges [begin, end) covering [0, n) in order, built from
// per-instruction boundary bits (1 = closes a segment; the final instruction
// always closes the last segment whatever its bit says).
std::vector<std::pair<int, int>> boundary_ranges(const std::vector<int>& bits);

// Frame slots referenced by the instructions ([rbp-N] with a width prefix),
// ordered by ascending offset — the allocation order, which is also the
// normalized v<k> order. Widths come from the DWORD/QWORD prefix.
struct FrameSlot {
  int offset = 0;
  int width = 4;
};
std::vector<FrameSlot> collect_frame_slots(const std::vector<CanonicalInstruction>& insns);

// Argument count implied by a CALL payload's token stream (the post-order
// forest left on the stack), or nullopt when the stream is malformed.
std::optional<int> implied_arg_count(const std::vector<std::string>& payload);

// Argument count from the argument-register loads (rdi/rsi/rdx/rcx) directly
// preceding the call instruction. `contiguous` reports whether the loaded
// registers form the ABI prefix; anything else is low-confidence.
struct ArgCountGuess {
  int count = 0;
  bool contiguous = true;
};
ArgCountGuess infer_call_arg_count(const std::vector<CanonicalInstruction>& insns, int call_idx);

// Rebuilds the full IL from per-segment translations: synthesizes the DECL
// lines from the frame slots, opens an if-block at every forward conditional
// branch and closes it at the branch target, distinguishing an else arm (the
// then-arm's trailing forward jump skips to the else's end) from a
// mid-function return's epilogue jump (lone, or landing exactly on the close
// address). While blocks arrive whole: the model translates the loop-back
// jump's segment as END.
struct ReassembledFunction {
  std::vector<SeamLine> lines;
  std::vector<std::string> notes;  // low-confidence call counts, repairs
};

ReassembledFunction reassemble(const std::vector<CanonicalInstruction>& insns,
                               const std::vector<std::pair<int, int>>& segments,
                               const std::vector<SeamLine>& translated);

}  // namespace seam
