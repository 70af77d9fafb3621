#include "sccl/optim.hpp"

#include <cmath>

#include "sccl/error.hpp"

namespace sccl {

void ParameterSet::add(const std::string& name, Tensor tensor, std::vector<std::size_t> frozen_rows) {
  if (!tensor.defined() || !tensor.trainable()) {
    throw ConfigError("parameter '" + name + "' is not a trainable tensor");
  }
  auto [it, inserted] = params_.emplace(name, NamedParameter{name, std::move(tensor), std::move(frozen_rows)});
  if (!inserted) throw ConfigError("duplicate parameter name '" + name + "'");
}

const Tensor& ParameterSet::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second.tensor;
}

Tensor& ParameterSet::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second.tensor;
}

std::size_t ParameterSet::total_values() const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_) n += p.tensor.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& [_, p] : params_) p.tensor.zero_grad();
}

void ParameterSet::scale_grad(double factor) {
  for (auto& [_, p] : params_) {
    for (auto& g : p.tensor.mutable_grad()) g *= factor;
  }
}

namespace {

void drop_frozen_rows(NamedParameter& p) {
  if (p.frozen_rows.empty()) return;
  auto g = p.tensor.mutable_grad();
  const std::size_t rows = p.tensor.dim(0);
  const std::size_t width = p.tensor.size() / rows;
  for (std::size_t r : p.frozen_rows) {
    for (std::size_t c = 0; c < width; ++c) g[r * width + c] = 0.0;
  }
}

}  // namespace

void Adam::step(ParameterSet& params) {
  ++step_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (auto& [name, p] : params) {
    drop_frozen_rows(p);
    auto g = p.tensor.mutable_grad();
    auto w = p.tensor.mutable_data();
    auto& st = state_[name];
    if (st.m.size() != w.size()) {
      st.m.assign(w.size(), 0.0);
      st.v.assign(w.size(), 0.0);
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      st.m[i] = cfg_.beta1 * st.m[i] + (1.0 - cfg_.beta1) * g[i];
      st.v[i] = cfg_.beta2 * st.v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double mhat = st.m[i] / c1;
      const double vhat = st.v[i] / c2;
      w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void Sgd::step(ParameterSet& params) {
  for (auto& [_, p] : params) {
    drop_frozen_rows(p);
    auto g = p.tensor.mutable_grad();
    auto w = p.tensor.mutable_data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr_ * g[i];
  }
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg) {
  if (cfg.kind == OptimizerKind::Sgd) return std::make_unique<Sgd>(cfg.lr);
  return std::make_unique<Adam>(cfg);
}

}  // namespace sccl
