#pragma once

#include "nnkit/graph.hpp"

namespace seam::nn {

// How the {0,1} mask gates attention:
//   Additive — masked logits are excluded from the softmax entirely, so
//     masked positions get weight exactly zero (the default).
//   Literal  — logits are multiplied elementwise by the mask before a plain
//     softmax; masked logits become 0, not -inf, so they keep nonzero
//     weight. Kept only as an ablation arm.
enum class MaskMode { Additive, Literal };

template <typename T>
struct AttentionResult {
  typename GraphT<T>::Var out;      // (n_q, d)
  typename GraphT<T>::Var weights;  // (heads, n_q, n_k), rows sum to 1
};

// Multi-head scaled dot-product attention over already-projected q/k/v
// (shapes (n_q,d), (n_k,d), (n_k,d); d divisible by heads). mask is (n_q,n_k)
// with {0,1} entries. rel_table, when valid, is a per-head bias table of
// shape (heads, 2*clip_dist+1) added to the logits at index clip(j-i,
// clip_dist) + clip_dist; pass an invalid Var for no relative bias.
template <typename T>
AttentionResult<T> masked_attention(GraphT<T>& g, typename GraphT<T>::Var q,
                                    typename GraphT<T>::Var k, typename GraphT<T>::Var v,
                                    const TensorT<T>& mask, typename GraphT<T>::Var rel_table,
                                    int clip_dist, int heads,
                                    MaskMode mode = MaskMode::Additive);

template <typename T>
TensorT<T> ones_mask(int n_q, int n_k);

// Lower-triangular mask: position i may attend to j <= i.
template <typename T>
TensorT<T> causal_mask(int n);

}  // namespace seam::nn
