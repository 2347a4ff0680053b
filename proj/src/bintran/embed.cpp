#include "bintran/embed.hpp"

#include <set>

#include "asmtext/asm_parser.hpp"
#include "common/error.hpp"

namespace seam {

std::vector<std::string> instruction_words(const CanonicalInstruction& insn) {
  std::vector<std::string> words;
  words.reserve(insn.tokens.size() + 1);
  words.push_back(insn.mnemonic);
  words.insert(words.end(), insn.tokens.begin(), insn.tokens.end());
  return words;
}

std::vector<std::string> operand_items(const CanonicalInstruction& insn) {
  std::set<std::string> items;
  std::vector<std::string> bracket;
  bool inside = false;
  for (const std::string& tok : insn.tokens) {
    if (tok == "[") {
      inside = true;
      bracket.clear();
      continue;
    }
    if (tok == "]") {
      inside = false;
      std::string key;
      bool has_rbp = false;
      for (const std::string& part : bracket) {
        key += part;
        if (part == "rbp") has_rbp = true;
      }
      if (has_rbp) items.insert("slot:" + key);
      continue;
    }
    if (inside) bracket.push_back(tok);
    if (is_register_token(tok)) {
      const std::string family = register_family(tok);
      if (family != "rbp" && family != "rsp") items.insert("reg:" + family);
    }
  }
  return {items.begin(), items.end()};
}

nn::Graph::Var embed_instructions(nn::Graph& g, nn::ParameterStore& params,
                                  const std::vector<CanonicalInstruction>& insns,
                                  const TokenVocab& src_vocab, int max_words) {
  if (insns.empty()) raise(ErrorKind::Validate, "cannot embed an empty instruction sequence");
  auto emb = g.param(params, "src.emb");
  auto pos = g.param(params, "src.pos_word");
  auto empty_op = g.param(params, "src.empty_op");

  std::vector<int> mnemonic_ids;
  mnemonic_ids.reserve(insns.size());
  std::vector<nn::Graph::Var> operand_rows;
  operand_rows.reserve(insns.size());
  for (const CanonicalInstruction& insn : insns) {
    const int words = static_cast<int>(insn.tokens.size()) + 1;
    if (words > max_words) {
      raise(ErrorKind::Model, "instruction \"" + canonical_line(insn) + "\" has " +
                                  std::to_string(words) + " words; the word-position cap is " +
                                  std::to_string(max_words));
    }
    mnemonic_ids.push_back(src_vocab.lookup(insn.mnemonic));
    if (insn.tokens.empty()) {
      operand_rows.push_back(empty_op);
      continue;
    }
    std::vector<int> token_ids, pos_ids;
    for (std::size_t j = 0; j < insn.tokens.size(); ++j) {
      token_ids.push_back(src_vocab.lookup(insn.tokens[j]));
      pos_ids.push_back(static_cast<int>(j) + 1);
    }
    auto positioned = g.add(g.embedding(emb, token_ids), g.embedding(pos, pos_ids));
    operand_rows.push_back(g.mean_axis(positioned, 0));
  }

  auto p0 = g.mean_axis(g.embedding(pos, {0}), 0);
  auto mnemonics = g.add(g.embedding(emb, mnemonic_ids), p0);
  return g.concat_cols(mnemonics, g.stack_rows(operand_rows));
}

nn::Tensor build_dependency_mask(const std::vector<CanonicalInstruction>& insns) {
  const int n = static_cast<int>(insns.size());
  std::vector<std::set<std::string>> items(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto list = operand_items(insns[static_cast<std::size_t>(i)]);
    items[static_cast<std::size_t>(i)] = {list.begin(), list.end()};
  }
  nn::Tensor mask({n, n});
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      bool related = (i == j) || (j - i == 1);
      if (!related) {
        for (const std::string& item : items[static_cast<std::size_t>(i)]) {
          if (items[static_cast<std::size_t>(j)].count(item)) {
            related = true;
            break;
          }
        }
      }
      mask.at(i, j) = related ? 1.0f : 0.0f;
      mask.at(j, i) = mask.at(i, j);
    }
  }
  return mask;
}

}  // namespace seam
