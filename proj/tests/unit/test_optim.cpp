#include <cmath>

#include "doctest.h"
#include "sccl/error.hpp"
#include "sccl/ops.hpp"
#include "sccl/optim.hpp"

using namespace sccl;

TEST_CASE("parameter set names are unique and ordered") {
  ParameterSet set;
  set.add("b", Tensor::parameter({1}, {0.0}));
  set.add("a", Tensor::parameter({2}, {0.0, 0.0}));
  CHECK_THROWS_AS(set.add("a", Tensor::parameter({1}, {0.0})), ConfigError);
  CHECK_THROWS_AS(set.add("c", Tensor::constant({1}, {0.0})), ConfigError);
  CHECK(set.begin()->first == "a");
  CHECK(set.total_values() == 3);
}

TEST_CASE("first Adam step moves every coordinate by lr against the gradient sign") {
  // With bias correction m_hat = g and v_hat = g^2, so the step is lr * g / (|g| + eps).
  ParameterSet set;
  const Tensor w = Tensor::parameter({3}, {1.0, -2.0, 0.5});
  set.add("w", w);
  Adam adam({.kind = OptimizerKind::Adam, .lr = 0.1});
  set.zero_grad();
  backward(sum(mul(w, Tensor::constant({3}, {2.0, -4.0, 0.0}))));
  adam.step(set);
  CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(-1.9).epsilon(1e-9));
  CHECK(w[2] == 0.5);
}

TEST_CASE("Adam matches a hand-rolled reference over several steps") {
  ParameterSet set;
  const Tensor w = Tensor::parameter({2}, {0.3, -0.7});
  set.add("w", w);
  const OptimizerConfig cfg{.kind = OptimizerKind::Adam, .lr = 0.05};
  Adam adam(cfg);
  double ref[2] = {0.3, -0.7}, m[2] = {0, 0}, v[2] = {0, 0};
  for (int t = 1; t <= 5; ++t) {
    set.zero_grad();
    backward(sum(mul(mul(w, w), w)));  // grad 3 w^2
    adam.step(set);
    for (int i = 0; i < 2; ++i) {
      const double g = 3 * ref[i] * ref[i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, t)), vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  CHECK(w[0] == doctest::Approx(ref[0]).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(ref[1]).epsilon(1e-12));
}

TEST_CASE("SGD step and frozen rows") {
  ParameterSet set;
  const Tensor table = Tensor::parameter({2, 2}, {0.0, 0.0, 1.0, 1.0});
  set.add("table", table, {0});
  Sgd sgd(0.5);
  set.zero_grad();
  backward(sum(table));
  sgd.step(set);
  CHECK(table.to_vector() == std::vector<double>{0.0, 0.0, 0.5, 0.5});
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  for (auto kind : {OptimizerKind::Adam, OptimizerKind::Sgd}) {
    ParameterSet set;
    const Tensor w = Tensor::parameter({2}, {1.25, -3.5});
    set.add("w", w);
    auto opt = make_optimizer({.kind = kind, .lr = 0.0});
    for (int i = 0; i < 10; ++i) {
      set.zero_grad();
      backward(sum(mul(w, w)));
      opt->step(set);
    }
    CHECK(w.to_vector() == std::vector<double>{1.25, -3.5});
  }
}
