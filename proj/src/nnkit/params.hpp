#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "nnkit/tensor.hpp"

namespace seam::nn {

// Named parameter tensors with matching gradient slots. Creation order is
// remembered and drives every iteration (init, update, serialization), so a
// fixed seed gives bit-identical parameters and training runs.
template <typename T>
class ParameterStoreT {
 public:
  // Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)]. fan_in
  // defaults to the first dimension.
  TensorT<T>& create(const std::string& name, std::vector<int> dims, Rng& rng, int fan_in = 0);
  // Inserts a ready-made tensor (checkpoint load, handcrafted fixtures).
  TensorT<T>& adopt(const std::string& name, TensorT<T> value);

  bool has(const std::string& name) const;
  TensorT<T>& value(const std::string& name);
  const TensorT<T>& value(const std::string& name) const;
  TensorT<T>& grad(const std::string& name);

  const std::vector<std::string>& names() const { return order_; }
  void zero_grads();
  std::int64_t parameter_count() const;

 private:
  int index_of(const std::string& name) const;

  std::vector<std::string> order_;
  std::map<std::string, int> index_;
  std::vector<TensorT<T>> values_;
  std::vector<TensorT<T>> grads_;
};

// Step-size schedule decoupled from the momentum state: the schedule scales
// the applied update, never the accumulated velocity.
struct StepSchedule {
  double base = 0.001;
  int warmup = 0;        // linear ramp over the first `warmup` steps
  double decay = 1.0;    // multiplied in every `decay_every` steps after warmup
  int decay_every = 0;   // 0 disables decay
  double at(std::int64_t step) const;
};

// Stochastic gradient descent with classical momentum:
//   v <- momentum * v + g;  p <- p - lr(step) * v
// Optional global-norm gradient clipping applied before the velocity update.
template <typename T>
class SgdMomentum {
 public:
  SgdMomentum(double momentum, StepSchedule schedule, double max_grad_norm = 0.0)
      : momentum_(momentum), schedule_(schedule), max_grad_norm_(max_grad_norm) {}

  void step(ParameterStoreT<T>& store);
  std::int64_t steps() const { return step_; }

 private:
  double momentum_;
  StepSchedule schedule_;
  double max_grad_norm_;
  std::int64_t step_ = 0;
  std::map<std::string, TensorT<T>> velocity_;
};

using ParameterStore = ParameterStoreT<float>;
using ParameterStore64 = ParameterStoreT<double>;

}  // namespace seam::nn
