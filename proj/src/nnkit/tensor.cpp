#include "nnkit/tensor.hpp"

#include <cmath>
#include <sstream>

namespace seam::nn {

template <typename T>
std::int64_t shape_numel(const std::vector<int>& dims) {
  std::int64_t n = 1;
  for (int d : dims) n *= d;
  return n;
}

std::string shape_text(const std::vector<int>& dims) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out << ",";
    out << dims[i];
  }
  out << ")";
  return out.str();
}

namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.size() > 4) {
    raise(ErrorKind::Numeric, "tensor rank " + std::to_string(dims.size()) + " exceeds 4");
  }
  for (int d : dims) {
    if (d <= 0) raise(ErrorKind::Numeric, "tensor dimension must be positive, got " + shape_text(dims));
  }
}

}  // namespace

template <typename T>
TensorT<T>::TensorT(std::vector<int> dims, T fill) : shape(std::move(dims)) {
  check_dims(shape);
  data.assign(static_cast<std::size_t>(shape_numel<T>(shape)), fill);
}

template <typename T>
TensorT<T> TensorT<T>::from(std::vector<int> dims, std::vector<T> values) {
  check_dims(dims);
  if (shape_numel<T>(dims) != static_cast<std::int64_t>(values.size())) {
    raise(ErrorKind::Numeric, "tensor payload length " + std::to_string(values.size()) +
                                  " does not match shape " + shape_text(dims));
  }
  TensorT t;
  t.shape = std::move(dims);
  t.data = std::move(values);
  return t;
}

template <typename T>
std::int64_t TensorT<T>::numel() const {
  return static_cast<std::int64_t>(data.size());
}

template <typename T>
int TensorT<T>::dim(int axis) const {
  if (axis < 0 || axis >= rank()) {
    raise(ErrorKind::Numeric, "axis " + std::to_string(axis) + " out of range for " + shape_text(shape));
  }
  return shape[static_cast<std::size_t>(axis)];
}

namespace {

[[noreturn]] void bad_index(const std::vector<int>& shape, int got_rank) {
  raise(ErrorKind::Numeric, "indexing rank-" + std::to_string(got_rank) +
                                " accessor on tensor of shape " + shape_text(shape));
}

}  // namespace

template <typename T>
T& TensorT<T>::at(int i) {
  if (rank() != 1) bad_index(shape, 1);
  return data[static_cast<std::size_t>(i)];
}

template <typename T>
T& TensorT<T>::at(int i, int j) {
  if (rank() != 2) bad_index(shape, 2);
  return data[static_cast<std::size_t>(i) * shape[1] + j];
}

template <typename T>
T& TensorT<T>::at(int i, int j, int k) {
  if (rank() != 3) bad_index(shape, 3);
  return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
}

template <typename T>
T& TensorT<T>::at(int i, int j, int k, int l) {
  if (rank() != 4) bad_index(shape, 4);
  return data[((static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k) * shape[3] + l];
}

template <typename T>
void check_finite(const TensorT<T>& t, const std::string& where) {
  for (T v : t.data) {
    if (!std::isfinite(static_cast<double>(v))) {
      raise(ErrorKind::Numeric, where + " produced a non-finite value");
    }
  }
}

template struct TensorT<float>;
template struct TensorT<double>;
template std::int64_t shape_numel<float>(const std::vector<int>&);
template std::int64_t shape_numel<double>(const std::vector<int>&);
template void check_finite<float>(const TensorT<float>&, const std::string&);
template void check_finite<double>(const TensorT<double>&, const std::string&);

}  // namespace seam::nn
