#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace seam::nn {

// Dense row-major tensor of rank 0..4. Float for training speed, double for
// gradient checking; both instantiations live in tensor.cpp. Every graph op
// scans its output for non-finite values, so a Tensor flowing through the kit
// is finite by construction.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> dims, T fill = T(0));
  static TensorT from(std::vector<int> dims, std::vector<T> values);

  int rank() const { return static_cast<int>(shape.size()); }
  std::int64_t numel() const;
  int dim(int axis) const;

  T& at(int i);
  T& at(int i, int j);
  T& at(int i, int j, int k);
  T& at(int i, int j, int k, int l);
  T at(int i) const { return const_cast<TensorT*>(this)->at(i); }
  T at(int i, int j) const { return const_cast<TensorT*>(this)->at(i, j); }
  T at(int i, int j, int k) const { return const_cast<TensorT*>(this)->at(i, j, k); }
  T at(int i, int j, int k, int l) const { return const_cast<TensorT*>(this)->at(i, j, k, l); }

  bool same_shape(const TensorT& other) const { return shape == other.shape; }
};

template <typename T>
std::int64_t shape_numel(const std::vector<int>& dims);

std::string shape_text(const std::vector<int>& dims);

// Raises Numeric naming `where` if any element is NaN/Inf.
template <typename T>
void check_finite(const TensorT<T>& t, const std::string& where);

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

}  // namespace seam::nn
