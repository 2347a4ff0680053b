#include "bintran/decompile.hpp"

#include <utility>

#include "asmtext/asm_parser.hpp"
#include "common/error.hpp"
#include "corpus/boundary.hpp"
#include "csubset/printer.hpp"

namespace seam {

namespace {

[[noreturn]] void fail_stage(const char* stage, const SeamError& err) {
  raise(err.kind(), std::string("stage ") + stage + ": " + err.what());
}

}  // namespace

SegmenterFn oracle_segmenter() {
  return [](const std::vector<CanonicalInstruction>&, const std::vector<int>& line_bits) {
    return line_bits;
  };
}

DecompiledFunction decompile_function(const AsmFunction& fn, const AsmStringTable& strings,
                                      BinTranModel& translator, const SegmenterFn& segmenter,
                                      const DecompileOptions& options) {
  DecompiledFunction result;
  result.symbol = fn.name;

  CoreBody core;
  CanonicalFunction canon;
  try {
    core = strip_frame(fn.insns);
    canon = canonicalize(core.insns, strings);
    for (const CanonicalInstruction& insn : canon.insns) {
      if (!translator.src_vocab.contains(insn.mnemonic)) {
        raise(ErrorKind::Parse, "unknown mnemonic \"" + insn.mnemonic + "\"");
      }
      for (const std::string& tok : insn.tokens) {
        if (!translator.src_vocab.contains(tok)) {
          raise(ErrorKind::Parse, "unknown operand token \"" + tok + "\"");
        }
      }
    }
  } catch (const SeamError& err) {
    fail_stage("parse", err);
  }

  std::vector<std::pair<int, int>> ranges;
  try {
    const std::vector<int> bits = segmenter(canon.insns, core.boundary);
    if (bits.size() != canon.insns.size()) {
      raise(ErrorKind::Validate, "segmenter returned " + std::to_string(bits.size()) +
                                     " bits for " + std::to_string(canon.insns.size()) +
                                     " instructions");
    }
    ranges = boundary_ranges(bits);
  } catch (const SeamError& err) {
    fail_stage("segment", err);
  }

  std::vector<SeamLine> translated;
  try {
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      const auto [begin, end] = ranges[k];
      const std::vector<CanonicalInstruction> segment(
          canon.insns.begin() + begin, canon.insns.begin() + end);
      TranslateResult line = translate(translator, segment);
      if (line.truncated) {
        result.notes.push_back("segment " + std::to_string(k) +
                               ": decode hit the length cap before the end token");
      }
      if (line.tokens.empty()) {
        raise(ErrorKind::Model, "segment " + std::to_string(k) + " translated to no tokens");
      }
      translated.push_back(
          {line.tokens.front(), {line.tokens.begin() + 1, line.tokens.end()}});
    }
  } catch (const SeamError& err) {
    fail_stage("translate", err);
  }

  try {
    ReassembledFunction assembled = reassemble(canon.insns, ranges, translated);
    result.lines = std::move(assembled.lines);
    for (std::string& n : assembled.notes) result.notes.push_back(std::move(n));
    result.literals = canon.literals;
  } catch (const SeamError& err) {
    fail_stage("reassemble", err);
  }

  try {
    LiftOptions lift_options;
    lift_options.renaming = options.renaming;
    lift_options.function_name = options.function_name;
    LiftResult lifted = lift(result.lines, result.literals, lift_options);
    result.ast = std::move(lifted.fn);
    for (std::string& d : lifted.diagnostics) result.notes.push_back("lift: " + std::move(d));
    result.c_text = print_function(result.ast);
  } catch (const SeamError& err) {
    fail_stage("lift", err);
  }

  return result;
}

std::vector<DecompiledFunction> decompile_text(const std::string& asm_text,
                                               BinTranModel& translator,
                                               const SegmenterFn& segmenter,
                                               const DecompileOptions& options) {
  ParsedAsm parsed;
  try {
    parsed = parse_asm(asm_text);
    if (parsed.functions.empty()) raise(ErrorKind::Parse, "no functions in the assembly text");
  } catch (const SeamError& err) {
    fail_stage("parse", err);
  }
  std::vector<DecompiledFunction> out;
  out.reserve(parsed.functions.size());
  for (const AsmFunction& fn : parsed.functions) {
    out.push_back(decompile_function(fn, parsed.strings, translator, segmenter, options));
  }
  return out;
}

}  // namespace seam
