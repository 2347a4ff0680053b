#pragma once

#include <string>

#include "nnkit/graph.hpp"

namespace seam::nn {

// Gated recurrent cell with forget/input/output gates and a tanh candidate:
//   i = sig(x Wxi + h Whi + bi)   f = sig(x Wxf + h Whf + bf)
//   o = sig(x Wxo + h Who + bo)   u = tanh(x Wxu + h Whu + bu)
//   c' = f * c + i * u            h' = o * tanh(c')
// Parameters are named <prefix>.{wx,wh,b}_{i,f,o,u}. States are (rows, d_h).
template <typename T>
struct RecurrentState {
  typename GraphT<T>::Var h;
  typename GraphT<T>::Var c;
};

template <typename T>
void create_recurrent_params(ParameterStoreT<T>& store, const std::string& prefix, int d_in,
                             int d_h, Rng& rng);

template <typename T>
RecurrentState<T> recurrent_step(GraphT<T>& g, ParameterStoreT<T>& store,
                                 const std::string& prefix, typename GraphT<T>::Var x,
                                 RecurrentState<T> state);

// Fresh zero state with `rows` parallel sequences.
template <typename T>
RecurrentState<T> zero_state(GraphT<T>& g, int rows, int d_h);

}  // namespace seam::nn
