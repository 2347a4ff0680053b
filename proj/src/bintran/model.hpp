#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bintran/embed.hpp"
#include "bintran/vocab.hpp"
#include "nnkit/attention.hpp"
#include "nnkit/graph.hpp"
#include "nnkit/params.hpp"

namespace seam {

struct BinTranConfig {
  int d_x = 128;        // word embedding width (encoder input is 2*d_x)
  int d_k = 128;        // hidden size
  int heads = 4;        // attention heads; d_k % heads == 0
  int clip_dist = 20;   // max relative distance for the positional bias
  int max_src_insns = 64;
  int max_tgt_tokens = 48;  // includes the start token
  int max_words = 16;       // per-instruction word-position rows
  int ffn_mult = 2;
  int beam_width = 1;  // configuration surface only; decoding is greedy
  std::uint64_t seed = 1;
  // Ablation arms. relative_positions=false swaps the relative bias for
  // learned absolute position rows; additive_mask=false multiplies logits by
  // the mask instead of excluding masked entries from the softmax.
  bool relative_positions = true;
  bool additive_mask = true;
};

void validate_config(const BinTranConfig& config);
Json config_to_json(const BinTranConfig& config);
BinTranConfig config_from_json(const Json& value);

struct BinTranModel {
  BinTranConfig config;
  TokenVocab src_vocab;
  TokenVocab tgt_vocab;
  nn::ParameterStore params;
};

// Creates every parameter (seeded by config.seed) in a fixed order, so two
// models built from the same config and vocabularies are byte-identical.
void init_bintran_params(BinTranModel& model);

// Encoder: two-step embedding -> input projection -> one dependency-masked
// multi-head attention block with relative positional bias -> feed-forward,
// both with residual + layer norm. Returns (n, d_k).
nn::Graph::Var encode(nn::Graph& g, BinTranModel& model,
                      const std::vector<CanonicalInstruction>& insns);

// Decoder states for a target prefix (ids, start token first): embedding with
// absolute positions -> causal self-attention -> cross-attention over the
// encoder output -> feed-forward. Returns (T, d_k).
nn::Graph::Var decode_states(nn::Graph& g, BinTranModel& model, nn::Graph::Var enc,
                             const std::vector<int>& prefix_ids);

// Next-token logits for every prefix position: (T, target vocab size).
nn::Graph::Var prefix_logits(nn::Graph& g, BinTranModel& model, nn::Graph::Var enc,
                             const std::vector<int>& prefix_ids);

// Teacher-forced mean cross-entropy of one segment -> target-line pair.
// `target_ids` excludes the specials; SOS/EOS framing happens inside.
nn::Graph::Var pair_loss(nn::Graph& g, BinTranModel& model,
                         const std::vector<CanonicalInstruction>& segment,
                         const std::vector<int>& target_ids);

struct TranslateResult {
  std::vector<std::string> tokens;  // emitted target tokens, specials excluded
  std::vector<double> step_probs;   // model probability per step, end step included
  bool truncated = false;           // cap reached before the end token
};

// Greedy decode of one segment. Empty segments are rejected.
TranslateResult translate(BinTranModel& model, const std::vector<CanonicalInstruction>& segment);

// log p of each teacher-forced step, decoded one step at a time the way
// translate() walks (fresh forward graph per step).
std::vector<double> forced_step_log_probs(BinTranModel& model,
                                          const std::vector<CanonicalInstruction>& segment,
                                          const std::vector<int>& target_ids);

// Sequence log-likelihood from a single teacher-forced pass.
double sequence_log_likelihood(BinTranModel& model,
                               const std::vector<CanonicalInstruction>& segment,
                               const std::vector<int>& target_ids);

std::vector<int> target_ids_for(const TokenVocab& tgt_vocab, const std::vector<std::string>& tokens);

void save_bintran(const BinTranModel& model, const std::filesystem::path& path);
BinTranModel load_bintran(const std::filesystem::path& path);

}  // namespace seam
