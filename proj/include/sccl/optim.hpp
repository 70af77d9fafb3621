#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sccl/tensor.hpp"

namespace sccl {

struct NamedParameter {
  std::string name;
  Tensor tensor;
  /// Leading-axis rows whose gradient is discarded before every update
  /// (the PAD row of an embedding table).
  std::vector<std::size_t> frozen_rows;
};

/// Trainable tensors keyed by checkpoint name, iterated in name order.
class ParameterSet {
 public:
  void add(const std::string& name, Tensor tensor, std::vector<std::size_t> frozen_rows = {});
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  std::size_t size() const { return params_.size(); }
  std::size_t total_values() const;
  void zero_grad();
  void scale_grad(double factor);

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, NamedParameter> params_;
};

enum class OptimizerKind { Adam, Sgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  /// Applies one update from the gradients currently held by `params`.
  virtual void step(ParameterSet& params) = 0;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(OptimizerConfig cfg) : cfg_(cfg) {}
  void step(ParameterSet& params) override;

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  OptimizerConfig cfg_;
  std::map<std::string, Moments> state_;
  long step_ = 0;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(ParameterSet& params) override;

 private:
  double lr_;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg);

}  // namespace sccl
