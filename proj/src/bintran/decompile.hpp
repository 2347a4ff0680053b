#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bintran/model.hpp"
#include "bintran/reassemble.hpp"
#include "csubset/ast.hpp"
#include "seamcode/lift.hpp"

namespace seam {

// Produces per-instruction boundary bits (1 = closes a segment) for a
// canonicalized body. `line_bits` is the debug-line oracle computed while
// stripping the frame — the model-free segmentation callers can opt into.
using SegmenterFn = std::function<std::vector<int>(const std::vector<CanonicalInstruction>& insns,
                                                   const std::vector<int>& line_bits)>;

// Segmentation straight from the debug-line oracle.
SegmenterFn oracle_segmenter();

struct DecompileOptions {
  const RenamingMap* renaming = nullptr;  // identifier recovery result, if any
  std::string function_name = "FUNC";
};

struct DecompiledFunction {
  std::string symbol;  // assembly symbol the function came from
  Function ast;
  std::string c_text;
  std::vector<SeamLine> lines;  // reassembled IL the AST was lifted from
  std::vector<SeamLiteral> literals;
  std::vector<std::string> notes;  // truncations, low-confidence calls, lift repairs
};

// Full pipeline for one parsed function: strip frame -> canonicalize ->
// segment -> translate per segment -> reassemble -> lift -> print. Errors
// carry the failing stage's name.
DecompiledFunction decompile_function(const AsmFunction& fn, const AsmStringTable& strings,
                                      BinTranModel& translator, const SegmenterFn& segmenter,
                                      const DecompileOptions& options = {});

// Parses assembly text and decompiles every function in it.
std::vector<DecompiledFunction> decompile_text(const std::string& asm_text,
                                               BinTranModel& translator,
                                               const SegmenterFn& segmenter,
                                               const DecompileOptions& options = {});

}  // namespace seam
