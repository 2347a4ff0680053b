#pragma once

#include <string>
#include <vector>

#include "asmtext/canonicalize.hpp"
#include "bintran/vocab.hpp"
#include "nnkit/attention.hpp"
#include "nnkit/graph.hpp"

namespace seam {

// Word view of one canonical instruction: mnemonic first, then the operand
// tokens verbatim (commas and brackets included — they carry group structure).
std::vector<std::string> instruction_words(const CanonicalInstruction& insn);

// Operand items an instruction references, for the dependency mask: register
// families (rbp/rsp excluded — the frame registers appear in nearly every
// memory operand, so counting them would relate everything to everything and
// drown the signal the mask exists to carry) and rbp-relative slots keyed by
// their bracket text.
std::vector<std::string> operand_items(const CanonicalInstruction& insn);

// Two-step instruction embedding. Step one embeds each word and adds its
// intra-instruction position row; step two keeps the positioned mnemonic
// vector whole and averages the positioned operand vectors (a learned
// empty-operand vector stands in when there are none), concatenating the two
// halves. Output is (n, 2*d_x). Requires parameters "src.emb" (V, d_x),
// "src.pos_word" (max_words, d_x) and "src.empty_op" (d_x).
nn::Graph::Var embed_instructions(nn::Graph& g, nn::ParameterStore& params,
                                  const std::vector<CanonicalInstruction>& insns,
                                  const TokenVocab& src_vocab, int max_words);

// Dependency mask M (n,n): m_ij = 1 iff i == j, |i-j| == 1, or instructions i
// and j share an operand item. Symmetric with unit diagonal.
nn::Tensor build_dependency_mask(const std::vector<CanonicalInstruction>& insns);

}  // namespace seam
