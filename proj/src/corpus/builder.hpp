#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asmtext/canonicalize.hpp"
#include "corpus/boundary.hpp"
#include "csubset/generator.hpp"
#include "csubset/printer.hpp"
#include "seamcode/lower.hpp"

namespace seam {

// One generated function rendered through one backend. `insns` holds the
// canonicalized body with frame setup/teardown stripped; `boundary[i] == 1`
// closes a segment, and segment k pairs with `lines[k]`.
struct CorpusSample {
  std::string backend;  // "ref" or "gcc"
  std::uint64_t seed = 0;
  int level = 0;
  StmtKind kind = StmtKind::Expression;
  std::string name;    // function name
  std::string source;  // printed subset source
  std::vector<CanonicalInstruction> insns;
  std::vector<int> boundary;
  std::vector<SeamLine> lines;                      // translation view of the IL
  std::vector<std::vector<std::string>> raw_lines;  // C-token targets, one per view line
  std::vector<SeamLiteral> asm_literals;            // harvested from `insns`
  std::vector<SeamLiteral> sc_literals;             // recorded while lowering
  RenamingMap renaming;
};

struct CorpusSpec {
  std::uint64_t seed = 1;
  int level = 0;
  int functions = 100;  // drawn before dedup, spread evenly over the four kinds
  int statements_min = 1;
  int statements_max = 3;
  bool allow_unsigned = false;
  bool use_gcc = false;  // also render through the external compiler when present
  double val_fraction = 0.1;
  double test_fraction = 0.1;
};

struct CorpusStats {
  int generated = 0;      // functions drawn
  int duplicates = 0;     // dropped: same body and assembly already present
  int gcc_built = 0;      // external renderings kept
  int gcc_rejected = 0;   // external renderings dropped (line info / group drift)
  int gcc_failed = 0;     // external compiler errored
};

struct Corpus {
  std::vector<CorpusSample> train;
  std::vector<CorpusSample> val;
  std::vector<CorpusSample> test;
  CorpusStats stats;
};

// Assembles a sample from a validated function and the assembly text one
// backend produced for it. Throws SeamError(Corpus) when the assembly cannot
// be aligned with the IL: missing line info, or a segment count that differs
// from the translation view (the reference backend never trips these).
CorpusSample make_sample(const Function& fn, const std::string& asm_text,
                         const std::string& backend);

// Printed source line of every translation-view line, in view order: block
// headers map to their statement's line, a while's END to its closing brace.
std::vector<int> view_source_lines(const Function& fn, const LineLayout& layout);

// C-token decoder targets for the raw-source ablation: the normalized
// function's printed lines, lexed, with IMM/STR standing in for literals.
std::vector<std::vector<std::string>> raw_view(const Function& fn);
std::vector<std::string> lex_c_line(const std::string& line);

Corpus build_corpus(const CorpusSpec& spec);

void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<CorpusSample>& rows);
std::vector<CorpusSample> load_corpus_jsonl(const std::filesystem::path& path);

// Segment <-> IL line training pairs of one sample.
struct LinePair {
  std::vector<CanonicalInstruction> segment;  // instructions of group k
  std::vector<std::string> target;            // [kind, tokens...] of view line k
  std::vector<std::string> raw_target;        // C tokens of the same line
};

std::vector<LinePair> line_pairs(const CorpusSample& sample);

}  // namespace seam
