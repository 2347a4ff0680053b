#include "bintran/vocab.hpp"

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "seamcode/tokens.hpp"

namespace seam {

int TokenVocab::add(const std::string& tok) {
  auto it = index.find(tok);
  if (it != index.end()) return it->second;
  const int id = static_cast<int>(tokens.size());
  tokens.push_back(tok);
  index.emplace(tok, id);
  return id;
}

int TokenVocab::lookup(const std::string& tok) const {
  auto it = index.find(tok);
  if (it == index.end()) raise(ErrorKind::Model, "token not in vocabulary: \"" + tok + "\"");
  return it->second;
}

TokenVocab build_source_vocab(const std::vector<CorpusSample>& samples) {
  std::set<std::string> seen;
  for (const CorpusSample& s : samples) {
    for (const CanonicalInstruction& insn : s.insns) {
      seen.insert(insn.mnemonic);
      seen.insert(insn.tokens.begin(), insn.tokens.end());
    }
  }
  TokenVocab vocab;
  vocab.add(kInsnToken);
  for (const std::string& tok : seen) vocab.add(tok);
  return vocab;
}

TokenVocab build_target_vocab() {
  TokenVocab vocab;
  vocab.add(kSosToken);
  vocab.add(kEosToken);
  vocab.add(kPadToken);
  for (const std::string& tok : seam_token_inventory()) vocab.add(tok);
  return vocab;
}

TokenVocab build_raw_target_vocab(const std::vector<CorpusSample>& samples) {
  std::set<std::string> seen;
  for (const CorpusSample& s : samples) {
    for (const auto& line : s.raw_lines) seen.insert(line.begin(), line.end());
  }
  TokenVocab vocab;
  vocab.add(kSosToken);
  vocab.add(kEosToken);
  vocab.add(kPadToken);
  for (const std::string& tok : seen) vocab.add(tok);
  return vocab;
}

Json vocab_to_json(const TokenVocab& vocab) { return Json(vocab.tokens); }

TokenVocab vocab_from_json(const Json& value) {
  if (!value.is_array()) raise(ErrorKind::Model, "vocabulary JSON must be an array of strings");
  TokenVocab vocab;
  for (const Json& item : value) {
    if (!item.is_string()) raise(ErrorKind::Model, "vocabulary JSON must be an array of strings");
    const std::string tok = item.get<std::string>();
    if (vocab.contains(tok)) raise(ErrorKind::Model, "vocabulary JSON repeats token \"" + tok + "\"");
    vocab.add(tok);
  }
  return vocab;
}

}  // namespace seam
