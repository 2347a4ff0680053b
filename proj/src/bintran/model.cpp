#include "bintran/model.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "nnkit/checkpoint.hpp"

namespace seam {

namespace {

using nn::Graph;
using Var = nn::Graph::Var;

// Numerically stable log(sum(exp(row))) in double, for decode-side
// probabilities read off float logits.
double row_logsumexp(const nn::Tensor& logits, int row) {
  const int v = logits.shape[1];
  double hi = logits.at(row, 0);
  for (int j = 1; j < v; ++j) hi = std::max(hi, static_cast<double>(logits.at(row, j)));
  double sum = 0.0;
  for (int j = 0; j < v; ++j) sum += std::exp(static_cast<double>(logits.at(row, j)) - hi);
  return hi + std::log(sum);
}

int row_argmax(const nn::Tensor& logits, int row) {
  const int v = logits.shape[1];
  int best = 0;
  for (int j = 1; j < v; ++j) {
    if (logits.at(row, j) > logits.at(row, best)) best = j;
  }
  return best;
}

Var ln_affine(Graph& g, nn::ParameterStore& params, Var x, const std::string& prefix) {
  auto normed = g.layer_norm(x);
  return g.add(g.mul(normed, g.param(params, prefix + ".g")), g.param(params, prefix + ".b"));
}

Var ffn(Graph& g, nn::ParameterStore& params, Var x, const std::string& prefix) {
  auto hidden = g.relu(g.add(g.matmul(x, g.param(params, prefix + ".w1")),
                             g.param(params, prefix + ".b1")));
  return g.add(g.matmul(hidden, g.param(params, prefix + ".w2")), g.param(params, prefix + ".b2"));
}

void create_attention(nn::ParameterStore& params, const std::string& prefix, int d_k, Rng& rng) {
  params.create(prefix + ".wq", {d_k, d_k}, rng);
  params.create(prefix + ".wk", {d_k, d_k}, rng);
  params.create(prefix + ".wv", {d_k, d_k}, rng);
  params.create(prefix + ".wo", {d_k, d_k}, rng);
}

void create_ln(nn::ParameterStore& params, const std::string& prefix, int d_k) {
  params.adopt(prefix + ".g", nn::Tensor({d_k}, 1.0f));
  params.adopt(prefix + ".b", nn::Tensor({d_k}, 0.0f));
}

void create_ffn(nn::ParameterStore& params, const std::string& prefix, int d_k, int mult,
                Rng& rng) {
  params.create(prefix + ".w1", {d_k, mult * d_k}, rng);
  params.adopt(prefix + ".b1", nn::Tensor({mult * d_k}, 0.0f));
  params.create(prefix + ".w2", {mult * d_k, d_k}, rng);
  params.adopt(prefix + ".b2", nn::Tensor({d_k}, 0.0f));
}

// Self-attention block over already-embedded states with residual + norm.
Var attention_block(Graph& g, nn::ParameterStore& params, const std::string& prefix, Var x,
                    Var keys, const nn::Tensor& mask, Var rel_table, const BinTranConfig& config) {
  auto q = g.matmul(x, g.param(params, prefix + ".wq"));
  auto k = g.matmul(keys, g.param(params, prefix + ".wk"));
  auto v = g.matmul(keys, g.param(params, prefix + ".wv"));
  const auto mode = config.additive_mask ? nn::MaskMode::Additive : nn::MaskMode::Literal;
  auto att = nn::masked_attention(g, q, k, v, mask, rel_table, config.clip_dist, config.heads,
                                  mode);
  return g.matmul(att.out, g.param(params, prefix + ".wo"));
}

std::vector<int> iota_ids(int n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

}  // namespace

void validate_config(const BinTranConfig& config) {
  if (config.d_x < 1 || config.d_k < 1) raise(ErrorKind::Config, "model widths must be positive");
  if (config.heads < 1 || config.d_k % config.heads != 0) {
    raise(ErrorKind::Config, "d_k (" + std::to_string(config.d_k) +
                                 ") must be divisible by the head count (" +
                                 std::to_string(config.heads) + ")");
  }
  if (config.clip_dist < 1) raise(ErrorKind::Config, "clip_dist must be at least 1");
  if (config.max_src_insns < 1 || config.max_tgt_tokens < 2 || config.max_words < 2) {
    raise(ErrorKind::Config, "sequence caps are too small to hold any sample");
  }
  if (config.ffn_mult < 1) raise(ErrorKind::Config, "ffn_mult must be at least 1");
  if (config.beam_width < 1) raise(ErrorKind::Config, "beam_width must be at least 1");
}

Json config_to_json(const BinTranConfig& c) {
  return Json{{"d_x", c.d_x},
              {"d_k", c.d_k},
              {"heads", c.heads},
              {"clip_dist", c.clip_dist},
              {"max_src_insns", c.max_src_insns},
              {"max_tgt_tokens", c.max_tgt_tokens},
              {"max_words", c.max_words},
              {"ffn_mult", c.ffn_mult},
              {"beam_width", c.beam_width},
              {"seed", c.seed},
              {"relative_positions", c.relative_positions},
              {"additive_mask", c.additive_mask}};
}

BinTranConfig config_from_json(const Json& value) {
  BinTranConfig c;
  c.d_x = value.value("d_x", c.d_x);
  c.d_k = value.value("d_k", c.d_k);
  c.heads = value.value("heads", c.heads);
  c.clip_dist = value.value("clip_dist", c.clip_dist);
  c.max_src_insns = value.value("max_src_insns", c.max_src_insns);
  c.max_tgt_tokens = value.value("max_tgt_tokens", c.max_tgt_tokens);
  c.max_words = value.value("max_words", c.max_words);
  c.ffn_mult = value.value("ffn_mult", c.ffn_mult);
  c.beam_width = value.value("beam_width", c.beam_width);
  c.seed = value.value("seed", c.seed);
  c.relative_positions = value.value("relative_positions", c.relative_positions);
  c.additive_mask = value.value("additive_mask", c.additive_mask);
  validate_config(c);
  return c;
}

void init_bintran_params(BinTranModel& model) {
  validate_config(model.config);
  if (model.src_vocab.size() == 0 || model.tgt_vocab.size() == 0) {
    raise(ErrorKind::Model, "vocabularies must be built before the parameters");
  }
  const BinTranConfig& c = model.config;
  auto& P = model.params;
  Rng rng(c.seed);

  P.create("src.emb", {model.src_vocab.size(), c.d_x}, rng, c.d_x);
  P.create("src.pos_word", {c.max_words, c.d_x}, rng, c.d_x);
  P.create("src.empty_op", {c.d_x}, rng, c.d_x);
  P.create("enc.w_in", {2 * c.d_x, c.d_k}, rng);
  if (c.relative_positions) {
    P.adopt("enc.rel", nn::Tensor({c.heads, 2 * c.clip_dist + 1}, 0.0f));
  } else {
    P.create("src.pos_insn", {c.max_src_insns, c.d_k}, rng, c.d_k);
  }
  create_attention(P, "enc.att", c.d_k, rng);
  create_ln(P, "enc.ln1", c.d_k);
  create_ffn(P, "enc.ffn", c.d_k, c.ffn_mult, rng);
  create_ln(P, "enc.ln2", c.d_k);

  P.create("tgt.emb", {model.tgt_vocab.size(), c.d_k}, rng, c.d_k);
  P.create("tgt.pos", {c.max_tgt_tokens, c.d_k}, rng, c.d_k);
  create_attention(P, "dec.self", c.d_k, rng);
  create_ln(P, "dec.ln1", c.d_k);
  create_attention(P, "dec.cross", c.d_k, rng);
  create_ln(P, "dec.ln2", c.d_k);
  create_ffn(P, "dec.ffn", c.d_k, c.ffn_mult, rng);
  create_ln(P, "dec.ln3", c.d_k);
  P.create("out.w", {c.d_k, model.tgt_vocab.size()}, rng);
  P.adopt("out.b", nn::Tensor({model.tgt_vocab.size()}, 0.0f));
}

Var encode(Graph& g, BinTranModel& model, const std::vector<CanonicalInstruction>& insns) {
  const BinTranConfig& c = model.config;
  const int n = static_cast<int>(insns.size());
  if (n > c.max_src_insns) {
    raise(ErrorKind::Model, "segment has " + std::to_string(n) +
                                " instructions; the model cap is " +
                                std::to_string(c.max_src_insns));
  }
  auto x = embed_instructions(g, model.params, insns, model.src_vocab, c.max_words);
  auto h = g.matmul(x, g.param(model.params, "enc.w_in"));
  Var rel{};
  if (c.relative_positions) {
    rel = g.param(model.params, "enc.rel");
  } else {
    h = g.add(h, g.embedding(g.param(model.params, "src.pos_insn"), iota_ids(n)));
  }
  const nn::Tensor mask = build_dependency_mask(insns);
  auto att = attention_block(g, model.params, "enc.att", h, h, mask, rel, c);
  auto h1 = ln_affine(g, model.params, g.add(h, att), "enc.ln1");
  auto h2 = ln_affine(g, model.params, g.add(h1, ffn(g, model.params, h1, "enc.ffn")), "enc.ln2");
  return h2;
}

Var decode_states(Graph& g, BinTranModel& model, Var enc, const std::vector<int>& prefix_ids) {
  const BinTranConfig& c = model.config;
  const int t = static_cast<int>(prefix_ids.size());
  if (t == 0) raise(ErrorKind::Model, "decoder prefix is empty");
  if (t > c.max_tgt_tokens) {
    raise(ErrorKind::Model, "target sequence has " + std::to_string(t) +
                                " tokens; the model cap is " + std::to_string(c.max_tgt_tokens));
  }
  auto y = g.add(g.embedding(g.param(model.params, "tgt.emb"), prefix_ids),
                 g.embedding(g.param(model.params, "tgt.pos"), iota_ids(t)));
  // The causal mask is never subject to the mask-mode ablation: multiplying
  // future logits by zero would still let them through the softmax.
  auto self_q = g.matmul(y, g.param(model.params, "dec.self.wq"));
  auto self_k = g.matmul(y, g.param(model.params, "dec.self.wk"));
  auto self_v = g.matmul(y, g.param(model.params, "dec.self.wv"));
  auto self = nn::masked_attention(g, self_q, self_k, self_v, nn::causal_mask<float>(t), Var{},
                                   c.clip_dist, c.heads, nn::MaskMode::Additive);
  auto self_o = g.matmul(self.out, g.param(model.params, "dec.self.wo"));
  auto y1 = ln_affine(g, model.params, g.add(y, self_o), "dec.ln1");

  const int n = g.value(enc).shape[0];
  auto cross_q = g.matmul(y1, g.param(model.params, "dec.cross.wq"));
  auto cross_k = g.matmul(enc, g.param(model.params, "dec.cross.wk"));
  auto cross_v = g.matmul(enc, g.param(model.params, "dec.cross.wv"));
  auto cross = nn::masked_attention(g, cross_q, cross_k, cross_v, nn::ones_mask<float>(t, n),
                                    Var{}, c.clip_dist, c.heads, nn::MaskMode::Additive);
  auto cross_o = g.matmul(cross.out, g.param(model.params, "dec.cross.wo"));
  auto y2 = ln_affine(g, model.params, g.add(y1, cross_o), "dec.ln2");

  auto y3 = ln_affine(g, model.params, g.add(y2, ffn(g, model.params, y2, "dec.ffn")), "dec.ln3");
  return y3;
}

Var prefix_logits(Graph& g, BinTranModel& model, Var enc, const std::vector<int>& prefix_ids) {
  auto states = decode_states(g, model, enc, prefix_ids);
  return g.add(g.matmul(states, g.param(model.params, "out.w")), g.param(model.params, "out.b"));
}

Var pair_loss(Graph& g, BinTranModel& model, const std::vector<CanonicalInstruction>& segment,
              const std::vector<int>& target_ids) {
  const int sos = model.tgt_vocab.lookup(kSosToken);
  const int eos = model.tgt_vocab.lookup(kEosToken);
  std::vector<int> prefix{sos};
  prefix.insert(prefix.end(), target_ids.begin(), target_ids.end());
  std::vector<int> labels(target_ids);
  labels.push_back(eos);
  auto enc = encode(g, model, segment);
  auto logits = prefix_logits(g, model, enc, prefix);
  return g.cross_entropy(logits, labels);
}

TranslateResult translate(BinTranModel& model, const std::vector<CanonicalInstruction>& segment) {
  if (segment.empty()) raise(ErrorKind::Validate, "translate called with an empty segment");
  const int sos = model.tgt_vocab.lookup(kSosToken);
  const int eos = model.tgt_vocab.lookup(kEosToken);
  nn::Graph g(false);
  auto enc = encode(g, model, segment);
  TranslateResult result;
  std::vector<int> prefix{sos};
  while (static_cast<int>(prefix.size()) < model.config.max_tgt_tokens) {
    auto logits = prefix_logits(g, model, enc, prefix);
    const nn::Tensor& rows = g.value(logits);
    const int last = rows.shape[0] - 1;
    const int pick = row_argmax(rows, last);
    const double log_p = static_cast<double>(rows.at(last, pick)) - row_logsumexp(rows, last);
    result.step_probs.push_back(std::exp(log_p));
    if (pick == eos) return result;
    result.tokens.push_back(model.tgt_vocab.tokens[static_cast<std::size_t>(pick)]);
    prefix.push_back(pick);
  }
  result.truncated = true;
  return result;
}

std::vector<double> forced_step_log_probs(BinTranModel& model,
                                          const std::vector<CanonicalInstruction>& segment,
                                          const std::vector<int>& target_ids) {
  if (segment.empty()) raise(ErrorKind::Validate, "translate called with an empty segment");
  const int sos = model.tgt_vocab.lookup(kSosToken);
  const int eos = model.tgt_vocab.lookup(kEosToken);
  std::vector<int> labels(target_ids);
  labels.push_back(eos);
  std::vector<double> log_probs;
  std::vector<int> prefix{sos};
  for (int label : labels) {
    nn::Graph g(false);
    auto enc = encode(g, model, segment);
    auto logits = prefix_logits(g, model, enc, prefix);
    const nn::Tensor& rows = g.value(logits);
    const int last = rows.shape[0] - 1;
    log_probs.push_back(static_cast<double>(rows.at(last, label)) - row_logsumexp(rows, last));
    prefix.push_back(label);
  }
  return log_probs;
}

double sequence_log_likelihood(BinTranModel& model,
                               const std::vector<CanonicalInstruction>& segment,
                               const std::vector<int>& target_ids) {
  const int sos = model.tgt_vocab.lookup(kSosToken);
  const int eos = model.tgt_vocab.lookup(kEosToken);
  std::vector<int> prefix{sos};
  prefix.insert(prefix.end(), target_ids.begin(), target_ids.end());
  std::vector<int> labels(target_ids);
  labels.push_back(eos);
  nn::Graph g(false);
  auto enc = encode(g, model, segment);
  auto logits = prefix_logits(g, model, enc, prefix);
  const nn::Tensor& rows = g.value(logits);
  double ll = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const int row = static_cast<int>(t);
    ll += static_cast<double>(rows.at(row, labels[t])) - row_logsumexp(rows, row);
  }
  return ll;
}

std::vector<int> target_ids_for(const TokenVocab& tgt_vocab,
                                const std::vector<std::string>& tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& tok : tokens) ids.push_back(tgt_vocab.lookup(tok));
  return ids;
}

void save_bintran(const BinTranModel& model, const std::filesystem::path& path) {
  Json sidecar{{"kind", "bintran"},
               {"config", config_to_json(model.config)},
               {"src_vocab", vocab_to_json(model.src_vocab)},
               {"tgt_vocab", vocab_to_json(model.tgt_vocab)}};
  nn::save_checkpoint(model.params, path, sidecar.dump(2));
}

BinTranModel load_bintran(const std::filesystem::path& path) {
  BinTranModel model;
  const std::string sidecar_text = nn::load_checkpoint(model.params, path);
  Json sidecar = Json::parse(sidecar_text);
  if (sidecar.value("kind", "") != "bintran") {
    raise(ErrorKind::Model, "checkpoint at " + path.string() + " is not a translator model");
  }
  model.config = config_from_json(sidecar.at("config"));
  model.src_vocab = vocab_from_json(sidecar.at("src_vocab"));
  model.tgt_vocab = vocab_from_json(sidecar.at("tgt_vocab"));
  return model;
}

}  // namespace seam
