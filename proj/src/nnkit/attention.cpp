#include "nnkit/attention.hpp"

#include <cmath>

namespace seam::nn {

template <typename T>
AttentionResult<T> masked_attention(GraphT<T>& g, typename GraphT<T>::Var q,
                                    typename GraphT<T>::Var k, typename GraphT<T>::Var v,
                                    const TensorT<T>& mask, typename GraphT<T>::Var rel_table,
                                    int clip_dist, int heads, MaskMode mode) {
  using Var = typename GraphT<T>::Var;
  const TensorT<T>& qv = g.value(q);
  const TensorT<T>& kv = g.value(k);
  const TensorT<T>& vv = g.value(v);
  if (qv.rank() != 2 || kv.rank() != 2 || vv.rank() != 2 || qv.shape[1] != kv.shape[1] ||
      kv.shape != vv.shape) {
    raise(ErrorKind::Numeric, "masked_attention expects q (n_q,d), k (n_k,d), v (n_k,d)");
  }
  if (mask.rank() != 2 || mask.shape[0] != qv.shape[0] || mask.shape[1] != kv.shape[0]) {
    raise(ErrorKind::Numeric, "attention mask must be (n_q,n_k), got " + shape_text(mask.shape));
  }
  const int d = qv.shape[1];
  if (heads < 1 || d % heads != 0) {
    raise(ErrorKind::Numeric, "attention width not divisible by head count");
  }
  const int dh = d / heads;

  Var qh = g.split_heads(q, heads);
  Var kh = g.split_heads(k, heads);
  Var vh = g.split_heads(v, heads);
  Var logits = g.scale(g.bmm(qh, g.transpose(kh)), 1.0 / std::sqrt(static_cast<double>(dh)));
  if (rel_table.valid()) logits = g.add_relative_bias(logits, rel_table, clip_dist);

  Var weights;
  if (mode == MaskMode::Additive) {
    weights = g.masked_softmax(logits, mask);
  } else {
    // Masked rows still need an attendable position; reuse the same check.
    for (T mv : mask.data) {
      if (mv != T(0) && mv != T(1)) raise(ErrorKind::Numeric, "mask entries must be 0 or 1");
    }
    for (int i = 0; i < mask.shape[0]; ++i) {
      bool any = false;
      for (int j = 0; j < mask.shape[1] && !any; ++j) {
        any = mask.data[static_cast<std::size_t>(i) * mask.shape[1] + j] == T(1);
      }
      if (!any) {
        raise(ErrorKind::Numeric, "mask row " + std::to_string(i) + " has no attendable position");
      }
    }
    weights = g.softmax(g.mul_batch(logits, g.input(mask)));
  }
  Var out = g.merge_heads(g.bmm(weights, vh));
  return {out, weights};
}

template <typename T>
TensorT<T> ones_mask(int n_q, int n_k) {
  return TensorT<T>({n_q, n_k}, T(1));
}

template <typename T>
TensorT<T> causal_mask(int n) {
  TensorT<T> m({n, n});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m.at(i, j) = T(1);
  }
  return m;
}

template AttentionResult<float> masked_attention<float>(GraphT<float>&, GraphT<float>::Var,
                                                        GraphT<float>::Var, GraphT<float>::Var,
                                                        const TensorT<float>&, GraphT<float>::Var,
                                                        int, int, MaskMode);
template AttentionResult<double> masked_attention<double>(GraphT<double>&, GraphT<double>::Var,
                                                          GraphT<double>::Var, GraphT<double>::Var,
                                                          const TensorT<double>&,
                                                          GraphT<double>::Var, int, int, MaskMode);
template TensorT<float> ones_mask<float>(int, int);
template TensorT<double> ones_mask<double>(int, int);
template TensorT<float> causal_mask<float>(int);
template TensorT<double> causal_mask<double>(int);

}  // namespace seam::nn
