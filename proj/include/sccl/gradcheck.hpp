#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sccl/optim.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
};

/// |a - b| / max(1e-8, |a| + |b|)
double relative_error(double analytic, double numeric);

/// Compares reverse-mode gradients of `loss_fn` against central differences
/// (f(theta + h) - f(theta - h)) / 2h for every entry of every parameter.
/// `loss_fn` must rebuild the graph on each call and be deterministic.
GradCheckResult finite_difference_check(const std::function<Tensor()>& loss_fn, ParameterSet& params,
                                        double h = 1e-5);

GradCheckResult finite_difference_check(const std::function<Tensor()>& loss_fn, std::vector<Tensor> params,
                                        double h = 1e-5);

}  // namespace sccl
