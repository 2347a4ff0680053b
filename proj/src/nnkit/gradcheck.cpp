#include "nnkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace seam::nn {

namespace {

double eval_loss(ParameterStore64& params, const LossBuilder& build_loss) {
  Graph64 g(false);
  Graph64::Var loss = build_loss(g, params);
  const Tensor64& v = g.value(loss);
  if (v.numel() != 1) raise(ErrorKind::Numeric, "grad_check loss must be scalar");
  return v.data[0];
}

}  // namespace

GradCheckReport grad_check(ParameterStore64& params, const LossBuilder& build_loss,
                           double epsilon) {
  params.zero_grads();
  {
    Graph64 g(true);
    Graph64::Var loss = build_loss(g, params);
    if (g.value(loss).numel() != 1) raise(ErrorKind::Numeric, "grad_check loss must be scalar");
    g.backward(loss);
  }
  GradCheckReport report;
  for (const std::string& name : params.names()) {
    Tensor64& value = params.value(name);
    const Tensor64& analytic = params.grad(name);
    for (std::size_t i = 0; i < value.data.size(); ++i) {
      const double saved = value.data[i];
      value.data[i] = saved + epsilon;
      const double up = eval_loss(params, build_loss);
      value.data[i] = saved - epsilon;
      const double down = eval_loss(params, build_loss);
      value.data[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic.data[i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-4});
      const double rel = std::fabs(a - numeric) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

}  // namespace seam::nn
