#include "sccl/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace sccl {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckResult finite_difference_check(const std::function<Tensor()>& loss_fn, ParameterSet& params, double h) {
  params.zero_grad();
  backward(loss_fn());

  GradCheckResult result;
  for (auto& [name, p] : params) {
    const std::vector<double> analytic(p.tensor.grad().begin(), p.tensor.grad().end());
    auto w = p.tensor.mutable_data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + h;
      const double up = loss_fn().item();
      w[i] = saved - h;
      const double down = loss_fn().item();
      w[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[i], numeric);
      ++result.entries_checked;
      if (err > result.max_rel_error || result.worst_param.empty()) {
        result.max_rel_error = err;
        result.worst_param = name;
        result.worst_index = i;
        result.worst_analytic = analytic[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

GradCheckResult finite_difference_check(const std::function<Tensor()>& loss_fn, std::vector<Tensor> params,
                                        double h) {
  ParameterSet set;
  for (std::size_t i = 0; i < params.size(); ++i) set.add("p" + std::to_string(i), params[i]);
  return finite_difference_check(loss_fn, set, h);
}

}  // namespace sccl
