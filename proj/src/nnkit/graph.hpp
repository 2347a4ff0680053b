#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nnkit/params.hpp"
#include "nnkit/tensor.hpp"

namespace seam::nn {

// Reverse-mode tape. Ops append nodes; the tape order is a topological order,
// so backward() is a single reverse sweep. Graphs are built per sample and
// discarded; parameters live in a ParameterStore that must outlive the graph.
// A graph constructed with track_grads=false runs forward-only (decoding).
//
// Every op validates input shapes and checks its output for non-finite
// values. Scalars are rank-1 tensors of shape (1).
template <typename T>
class GraphT {
 public:
  struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
  };

  explicit GraphT(bool track_grads = true) : track_(track_grads) {}
  GraphT(const GraphT&) = delete;
  GraphT& operator=(const GraphT&) = delete;

  Var input(TensorT<T> value, bool needs_grad = false);
  // Leaf backed by a store entry; backward accumulates into the store's grad.
  Var param(ParameterStoreT<T>& store, const std::string& name);

  Var matmul(Var a, Var b);            // (n,k)x(k,m) -> (n,m)
  Var bmm(Var a, Var b);               // (B,n,k)x(B,k,m) -> (B,n,m)
  Var transpose(Var x);                // swaps the last two axes (rank 2 or 3)
  Var add(Var a, Var b);               // same shape, or b rank-1 broadcast over rows
  Var mul(Var a, Var b);               // elementwise, same broadcast rule as add
  Var mul_batch(Var x, Var m);         // (B,n,m) * (n,m) broadcast over batch
  Var scale(Var x, double c);
  Var concat_cols(Var a, Var b);       // rank-1: (p)+(q)->(p+q); rank-2: along axis 1
  Var stack_rows(const std::vector<Var>& rows);  // k rank-1 (d) vars -> (k,d)
  Var mean_axis(Var x, int axis);      // rank-1 -> (1); rank-2 -> rank-1
  Var embedding(Var table, const std::vector<int>& ids);  // (V,d), n ids -> (n,d)
  Var layer_norm(Var x);               // last axis, no affine
  Var softmax(Var x);                  // last axis (rank 1..3)
  // Rows of the softmax are restricted to positions where mask==1; masked
  // positions get weight exactly zero. x rank-2 (n,m) or rank-3 (H,n,m),
  // mask (n,m) with {0,1} entries. A row with no attendable position raises.
  Var masked_softmax(Var x, const TensorT<T>& mask);
  Var relu(Var x);
  Var sigmoid(Var x);
  Var tanh_(Var x);
  // Mean negative log-likelihood of targets under softmax(logits) (n,V).
  Var cross_entropy(Var logits, const std::vector<int>& targets);
  // y[h,i,j] = x[h,i,j] + table[h, clip(j-i,d)+d]; x (H,n,m), table (H,2d+1).
  Var add_relative_bias(Var x, Var table, int clip_dist);
  Var split_heads(Var x, int heads);   // (n,d) -> (H,n,d/H)
  Var merge_heads(Var x);              // (H,n,dh) -> (n,H*dh)
  Var sum_all(Var x);                  // -> (1)

  const TensorT<T>& value(Var v) const;
  const TensorT<T>& grad(Var v) const;
  bool tracking() const { return track_; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss)=1 and sweeps the tape in reverse. Loss must be
  // scalar. Call at most once per graph.
  void backward(Var loss);

 private:
  struct Node {
    TensorT<T> value;
    TensorT<T> grad;  // allocated by backward() for needs-grad nodes
    std::function<void(GraphT&)> back;
    bool needs = false;
    std::string op;
  };

  Var make(TensorT<T> value, bool needs, std::function<void(GraphT&)> back, std::string op);
  Node& node(Var v);
  const Node& node(Var v) const;
  bool wants(Var v) const { return node(v).needs; }
  TensorT<T>& grad_slot(Var v) { return node(v).grad; }

  std::vector<Node> nodes_;
  bool track_;
  bool swept_ = false;
};

using Graph = GraphT<float>;
using Graph64 = GraphT<double>;

}  // namespace seam::nn
