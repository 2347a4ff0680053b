#pragma once

#include <functional>
#include <string>

#include "nnkit/graph.hpp"

namespace seam::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst;  // "<param>[<flat index>]"
};

// Compares reverse-mode gradients against central finite differences
// (loss(p+eps) - loss(p-eps)) / (2 eps) for every element of every parameter.
// build_loss must construct the loss from the store's current values on the
// graph it is given; it is called once with gradient tracking for the
// analytic pass and then twice per element forward-only. Double precision
// only — this is the oracle the float path is tested against.
using LossBuilder = std::function<Graph64::Var(Graph64&, ParameterStore64&)>;

GradCheckReport grad_check(ParameterStore64& params, const LossBuilder& build_loss,
                           double epsilon = 1e-5);

}  // namespace seam::nn
