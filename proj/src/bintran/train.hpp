#pragma once

#include <functional>
#include <vector>

#include "bintran/model.hpp"
#include "corpus/builder.hpp"
#include "nnkit/params.hpp"

namespace seam {

struct TrainOptions {
  int epochs = 10;
  double lr = 0.05;
  int warmup = 200;
  double decay = 1.0;      // per decay_every steps after warmup
  int decay_every = 0;     // 0 disables decay
  double momentum = 0.9;
  double clip_norm = 5.0;  // 0 disables clipping
  std::uint64_t seed = 1;  // shuffle order
  bool raw_targets = false;  // ablation arm: train against C tokens instead of IL
  int val_limit = 0;         // 0 = score every validation pair each epoch
  double stop_at_seq_acc = 0.0;  // early exit once validation reaches this (0 = never)
};

// One segment -> target-line pair with ids resolved against the vocabularies.
struct PreparedPair {
  std::vector<CanonicalInstruction> segment;
  std::vector<std::string> target_tokens;
  std::vector<int> target_ids;
};

std::vector<PreparedPair> prepare_pairs(const BinTranModel& model,
                                        const std::vector<CorpusSample>& samples,
                                        bool raw_targets);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_word_acc = 0.0;
  double val_seq_acc = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
  int best_epoch = -1;
  double best_val_seq_acc = 0.0;
};

// Word accuracy: positionally matched tokens over max(reference, prediction)
// length, totalled across pairs. Sequence accuracy: exact token match.
struct PairAccuracy {
  double word_acc = 0.0;
  double seq_acc = 0.0;
};
PairAccuracy score_pairs(BinTranModel& model, const std::vector<PreparedPair>& pairs, int limit = 0);

// One update per pair, teacher-forced cross-entropy, seeded shuffle each
// epoch, validation scored per epoch; the best-validation parameters are
// restored into the model before returning. Non-finite losses abort with the
// epoch and sample position. Single-threaded and bit-reproducible per seed.
TrainResult train_bintran(BinTranModel& model, const std::vector<PreparedPair>& train,
                          const std::vector<PreparedPair>& val, const TrainOptions& options,
                          const std::function<void(const EpochLog&)>& on_epoch = nullptr);

}  // namespace seam
