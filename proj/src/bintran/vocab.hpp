#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "common/jsonio.hpp"
#include "corpus/builder.hpp"

namespace seam {

// Closed token<->index bijection. Built once from the corpus (source side) or
// the fixed IL inventory (target side) and frozen; lookups of unseen tokens
// fail loudly because a trained model cannot say anything about them.
struct TokenVocab {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;

  int add(const std::string& tok);      // idempotent; returns the index
  int lookup(const std::string& tok) const;  // throws Model on unknown tokens
  bool contains(const std::string& tok) const { return index.count(tok) != 0; }
  int size() const { return static_cast<int>(tokens.size()); }
};

// Target-side specials. PAD is reserved (never emitted or consumed at desk
// scale, where batches hold one sequence); SOS/EOS frame every sequence.
inline constexpr const char* kSosToken = "<sos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kPadToken = "<pad>";
// Source-side instruction-boundary marker, reserved alongside corpus tokens.
inline constexpr const char* kInsnToken = "<insn>";

// Source alphabet: the boundary marker plus every mnemonic and operand token
// appearing in the samples, sorted for seed-independent layout.
TokenVocab build_source_vocab(const std::vector<CorpusSample>& samples);

// Target alphabet: specials plus the fixed IL inventory.
TokenVocab build_target_vocab();

// Target alphabet for the raw-C ablation arm: specials plus the sorted raw
// tokens of the samples' source lines.
TokenVocab build_raw_target_vocab(const std::vector<CorpusSample>& samples);

Json vocab_to_json(const TokenVocab& vocab);
TokenVocab vocab_from_json(const Json& value);

}  // namespace seam
