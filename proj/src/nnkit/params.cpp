#include "nnkit/params.hpp"

#include <cmath>

namespace seam::nn {

template <typename T>
TensorT<T>& ParameterStoreT<T>::create(const std::string& name, std::vector<int> dims, Rng& rng,
                                       int fan_in) {
  if (index_.count(name)) raise(ErrorKind::Model, "duplicate parameter name: " + name);
  if (fan_in == 0) fan_in = dims.empty() ? 1 : dims[0];
  if (fan_in <= 0) raise(ErrorKind::Model, "parameter " + name + " has non-positive fan-in");
  TensorT<T> value(dims);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (T& v : value.data) v = static_cast<T>(rng.symmetric(bound));
  return adopt(name, std::move(value));
}

template <typename T>
TensorT<T>& ParameterStoreT<T>::adopt(const std::string& name, TensorT<T> value) {
  if (index_.count(name)) raise(ErrorKind::Model, "duplicate parameter name: " + name);
  index_[name] = static_cast<int>(order_.size());
  order_.push_back(name);
  grads_.emplace_back(value.shape);
  values_.push_back(std::move(value));
  return values_.back();
}

template <typename T>
bool ParameterStoreT<T>::has(const std::string& name) const {
  return index_.count(name) != 0;
}

template <typename T>
int ParameterStoreT<T>::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) raise(ErrorKind::Model, "unknown parameter: " + name);
  return it->second;
}

template <typename T>
TensorT<T>& ParameterStoreT<T>::value(const std::string& name) {
  return values_[static_cast<std::size_t>(index_of(name))];
}

template <typename T>
const TensorT<T>& ParameterStoreT<T>::value(const std::string& name) const {
  return values_[static_cast<std::size_t>(index_of(name))];
}

template <typename T>
TensorT<T>& ParameterStoreT<T>::grad(const std::string& name) {
  return grads_[static_cast<std::size_t>(index_of(name))];
}

template <typename T>
void ParameterStoreT<T>::zero_grads() {
  for (auto& g : grads_) {
    for (T& v : g.data) v = T(0);
  }
}

template <typename T>
std::int64_t ParameterStoreT<T>::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& v : values_) n += v.numel();
  return n;
}

double StepSchedule::at(std::int64_t step) const {
  double lr = base;
  if (warmup > 0 && step < warmup) lr *= static_cast<double>(step + 1) / warmup;
  if (decay_every > 0 && decay != 1.0 && step >= warmup) {
    lr *= std::pow(decay, static_cast<double>((step - warmup) / decay_every));
  }
  return lr;
}

template <typename T>
void SgdMomentum<T>::step(ParameterStoreT<T>& store) {
  double scale = 1.0;
  if (max_grad_norm_ > 0.0) {
    double sq = 0.0;
    for (const auto& name : store.names()) {
      for (T g : store.grad(name).data) sq += static_cast<double>(g) * static_cast<double>(g);
    }
    const double norm = std::sqrt(sq);
    if (norm > max_grad_norm_) scale = max_grad_norm_ / norm;
  }
  const double lr = schedule_.at(step_);
  for (const auto& name : store.names()) {
    TensorT<T>& p = store.value(name);
    TensorT<T>& g = store.grad(name);
    auto it = velocity_.find(name);
    if (it == velocity_.end()) it = velocity_.emplace(name, TensorT<T>(p.shape)).first;
    TensorT<T>& v = it->second;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      v.data[i] = static_cast<T>(momentum_ * v.data[i] + scale * g.data[i]);
      p.data[i] -= static_cast<T>(lr * v.data[i]);
    }
    check_finite(p, "sgd update of " + name);
  }
  ++step_;
}

template class ParameterStoreT<float>;
template class ParameterStoreT<double>;
template class SgdMomentum<float>;
template class SgdMomentum<double>;

}  // namespace seam::nn
