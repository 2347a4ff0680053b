#include "nnkit/rnn.hpp"

namespace seam::nn {

namespace {
const char* kGates[4] = {"i", "f", "o", "u"};
}

template <typename T>
void create_recurrent_params(ParameterStoreT<T>& store, const std::string& prefix, int d_in,
                             int d_h, Rng& rng) {
  for (const char* gate : kGates) {
    store.create(prefix + ".wx_" + gate, {d_in, d_h}, rng);
    store.create(prefix + ".wh_" + gate, {d_h, d_h}, rng);
    store.create(prefix + ".b_" + gate, {d_h}, rng, d_h);
  }
}

template <typename T>
RecurrentState<T> recurrent_step(GraphT<T>& g, ParameterStoreT<T>& store,
                                 const std::string& prefix, typename GraphT<T>::Var x,
                                 RecurrentState<T> state) {
  using Var = typename GraphT<T>::Var;
  auto gate_pre = [&](const std::string& gate) -> Var {
    Var wx = g.param(store, prefix + ".wx_" + gate);
    Var wh = g.param(store, prefix + ".wh_" + gate);
    Var b = g.param(store, prefix + ".b_" + gate);
    return g.add(g.add(g.matmul(x, wx), g.matmul(state.h, wh)), b);
  };
  Var i = g.sigmoid(gate_pre("i"));
  Var f = g.sigmoid(gate_pre("f"));
  Var o = g.sigmoid(gate_pre("o"));
  Var u = g.tanh_(gate_pre("u"));
  Var c = g.add(g.mul(f, state.c), g.mul(i, u));
  Var h = g.mul(o, g.tanh_(c));
  return {h, c};
}

template <typename T>
RecurrentState<T> zero_state(GraphT<T>& g, int rows, int d_h) {
  return {g.input(TensorT<T>({rows, d_h})), g.input(TensorT<T>({rows, d_h}))};
}

template void create_recurrent_params<float>(ParameterStoreT<float>&, const std::string&, int,
                                             int, Rng&);
template void create_recurrent_params<double>(ParameterStoreT<double>&, const std::string&, int,
                                              int, Rng&);
template RecurrentState<float> recurrent_step<float>(GraphT<float>&, ParameterStoreT<float>&,
                                                     const std::string&, GraphT<float>::Var,
                                                     RecurrentState<float>);
template RecurrentState<double> recurrent_step<double>(GraphT<double>&, ParameterStoreT<double>&,
                                                       const std::string&, GraphT<double>::Var,
                                                       RecurrentState<double>);
template RecurrentState<float> zero_state<float>(GraphT<float>&, int, int);
template RecurrentState<double> zero_state<double>(GraphT<double>&, int, int);

}  // namespace seam::nn
