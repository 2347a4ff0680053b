#include "bintran/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace seam {

std::vector<PreparedPair> prepare_pairs(const BinTranModel& model,
                                        const std::vector<CorpusSample>& samples,
                                        bool raw_targets) {
  std::vector<PreparedPair> out;
  for (const CorpusSample& sample : samples) {
    for (LinePair& pair : line_pairs(sample)) {
      PreparedPair prepared;
      prepared.segment = std::move(pair.segment);
      prepared.target_tokens = raw_targets ? std::move(pair.raw_target) : std::move(pair.target);
      if (prepared.segment.empty()) {
        raise(ErrorKind::Corpus, "sample " + sample.name + " contains an empty segment");
      }
      const int n = static_cast<int>(prepared.segment.size());
      if (n > model.config.max_src_insns) {
        raise(ErrorKind::Config, "sample " + sample.name + " has a segment of " +
                                     std::to_string(n) + " instructions; raise max_src_insns");
      }
      const int t = static_cast<int>(prepared.target_tokens.size()) + 1;
      if (t > model.config.max_tgt_tokens) {
        raise(ErrorKind::Config, "sample " + sample.name + " has a target line of " +
                                     std::to_string(t - 1) + " tokens; raise max_tgt_tokens");
      }
      prepared.target_ids = target_ids_for(model.tgt_vocab, prepared.target_tokens);
      out.push_back(std::move(prepared));
    }
  }
  return out;
}

PairAccuracy score_pairs(BinTranModel& model, const std::vector<PreparedPair>& pairs, int limit) {
  const std::size_t count =
      limit > 0 ? std::min(pairs.size(), static_cast<std::size_t>(limit)) : pairs.size();
  if (count == 0) return {};
  std::int64_t matched = 0, slots = 0, exact = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const PreparedPair& pair = pairs[i];
    const TranslateResult got = translate(model, pair.segment);
    const std::size_t shared = std::min(got.tokens.size(), pair.target_tokens.size());
    for (std::size_t j = 0; j < shared; ++j) {
      if (got.tokens[j] == pair.target_tokens[j]) ++matched;
    }
    slots += static_cast<std::int64_t>(std::max(got.tokens.size(), pair.target_tokens.size()));
    if (!got.truncated && got.tokens == pair.target_tokens) ++exact;
  }
  PairAccuracy acc;
  acc.word_acc = slots == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(slots);
  acc.seq_acc = static_cast<double>(exact) / static_cast<double>(count);
  return acc;
}

TrainResult train_bintran(BinTranModel& model, const std::vector<PreparedPair>& train,
                          const std::vector<PreparedPair>& val, const TrainOptions& options,
                          const std::function<void(const EpochLog&)>& on_epoch) {
  if (train.empty()) raise(ErrorKind::Validate, "training set is empty");
  if (options.epochs < 1) raise(ErrorKind::Config, "epochs must be positive");

  nn::StepSchedule schedule{options.lr, options.warmup, options.decay, options.decay_every};
  nn::SgdMomentum<float> optimizer(options.momentum, schedule, options.clip_norm);
  Rng shuffle_rng(options.seed);

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  std::map<std::string, nn::Tensor> best;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const PreparedPair& pair = train[order[step]];
      try {
        model.params.zero_grads();
        nn::Graph g(true);
        auto loss = pair_loss(g, model, pair.segment, pair.target_ids);
        const double value = static_cast<double>(g.value(loss).at(0));
        if (!std::isfinite(value)) raise(ErrorKind::Numeric, "loss is non-finite");
        g.backward(loss);
        optimizer.step(model.params);
        loss_sum += value;
      } catch (const SeamError& err) {
        if (err.kind() != ErrorKind::Numeric) throw;
        raise(ErrorKind::Numeric,
              "training diverged at epoch " + std::to_string(epoch) + ", sample " +
                  std::to_string(step) + " of " + std::to_string(order.size()) + ": " +
                  err.what() + " (mean loss so far " +
                  std::to_string(step == 0 ? 0.0 : loss_sum / static_cast<double>(step)) + ")");
      }
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(order.size());
    const PairAccuracy acc = score_pairs(model, val, options.val_limit);
    log.val_word_acc = acc.word_acc;
    log.val_seq_acc = acc.seq_acc;
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);

    if (result.best_epoch < 0 || log.val_seq_acc > result.best_val_seq_acc) {
      result.best_epoch = epoch;
      result.best_val_seq_acc = log.val_seq_acc;
      best.clear();
      for (const std::string& name : model.params.names()) best[name] = model.params.value(name);
    }
    if (options.stop_at_seq_acc > 0.0 && log.val_seq_acc >= options.stop_at_seq_acc) break;
  }

  for (auto& [name, tensor] : best) model.params.value(name) = std::move(tensor);
  return result;
}

}  // namespace seam
