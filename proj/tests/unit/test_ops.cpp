#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "doctest.h"
#include "sccl/error.hpp"
#include "sccl/gradcheck.hpp"
#include "sccl/ops.hpp"
#include "sccl/random.hpp"

using namespace sccl;

namespace {

Tensor random_param(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  const auto n = shape_size(shape);
  return Tensor::parameter(std::move(shape), uniform_values(n, lo, hi, rng));
}

// A fixed random projection turns any output into a scalar with a generic
// upstream gradient.
Tensor project(const Tensor& y, std::uint64_t seed) {
  Rng rng = derive_rng(seed, "project");
  const Tensor r = Tensor::constant(y.shape(), uniform_values(y.size(), -1.0, 1.0, rng));
  return sum(mul(y, r));
}

void check_primitive(const std::string& name, const std::function<std::vector<Tensor>(Rng&)>& make,
                     const std::function<Tensor(const std::vector<Tensor>&)>& f) {
  for (std::uint64_t point = 0; point < 5; ++point) {
    Rng rng = derive_rng(point, name);
    const auto inputs = make(rng);
    const auto r = finite_difference_check([&] { return project(f(inputs), point); }, inputs, 1e-5);
    INFO(name << " point " << point << " worst " << r.worst_param << "[" << r.worst_index << "]");
    CHECK(r.max_rel_error < 1e-6);
  }
}

}  // namespace

TEST_CASE("hand values") {
  CHECK(sigmoid(Tensor::constant({1}, {0.0}))[0] == 0.5);
  const Tensor sm = softmax(Tensor::zeros({4}), 0);
  for (double v : sm.data()) CHECK(v == 0.25);

  const Tensor a = Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b = Tensor::constant({3, 2}, {7, 8, 9, 10, 11, 12});
  const Tensor c = matmul(a, b);
  CHECK(c.shape() == Shape{2, 2});
  CHECK(c.to_vector() == std::vector<double>{58, 64, 139, 154});
  CHECK(matmul(a, Tensor::constant({3}, {1, 0, -1})).to_vector() == std::vector<double>{-2, -2});

  CHECK(concat({a, a}, 0).shape() == Shape{4, 3});
  CHECK(concat({a, a}, 1).to_vector() == std::vector<double>{1, 2, 3, 1, 2, 3, 4, 5, 6, 4, 5, 6});
  CHECK(slice(a, 1, 1, 3).to_vector() == std::vector<double>{2, 3, 5, 6});
  CHECK(mean(a, 0).to_vector() == std::vector<double>{2.5, 3.5, 4.5});
  CHECK(mean(a).item() == 3.5);
  CHECK(relu(Tensor::constant({3}, {-1, 0, 2})).to_vector() == std::vector<double>{0, 0, 2});
  CHECK(l2_norm(Tensor::constant({2}, {3, 4})).item() == 5.0);
  const std::size_t idx[] = {2, 0, 2};
  CHECK(gather_rows(concat({a, a}, 0), idx).to_vector() ==
        std::vector<double>{1, 2, 3, 1, 2, 3, 1, 2, 3});
}

TEST_CASE("shape errors name the primitive and the shapes") {
  const Tensor a = Tensor::zeros({2, 3});
  const Tensor b = Tensor::zeros({2, 3});
  try {
    matmul(a, b);
    FAIL("no throw");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("2x3") != std::string::npos);
  }
  CHECK_THROWS_AS(add(a, Tensor::zeros({3, 2})), ShapeError);
  CHECK_THROWS_AS(concat({a, Tensor::zeros({2, 2})}, 0), ShapeError);
  CHECK_THROWS_AS(slice(a, 1, 2, 2), ShapeError);
  CHECK_THROWS_AS(reshape(a, {5}), ShapeError);
  CHECK_THROWS_AS(softmax(a, 2), ShapeError);
  CHECK_THROWS_AS(conv1d(a, Tensor::zeros({1, 3, 3})), ShapeError);
  CHECK_THROWS_AS(maxpool1d(a, 3), ShapeError);
  CHECK_THROWS_AS(softmax_cross_entropy(Tensor::zeros({6}), 6), ShapeError);
  const std::size_t bad[] = {2};
  CHECK_THROWS_AS(gather_rows(a, bad), ShapeError);
}

TEST_CASE("every primitive adjoint matches finite differences at five random points") {
  check_primitive("matmul", [](Rng& r) { return std::vector{random_param({3, 4}, r), random_param({4, 2}, r)}; },
                  [](const auto& in) { return matmul(in[0], in[1]); });
  check_primitive("matvec", [](Rng& r) { return std::vector{random_param({3, 4}, r), random_param({4}, r)}; },
                  [](const auto& in) { return matmul(in[0], in[1]); });
  check_primitive("add", [](Rng& r) { return std::vector{random_param({2, 3}, r), random_param({2, 3}, r)}; },
                  [](const auto& in) { return add(in[0], in[1]); });
  check_primitive("sub", [](Rng& r) { return std::vector{random_param({5}, r), random_param({5}, r)}; },
                  [](const auto& in) { return sub(in[0], in[1]); });
  check_primitive("mul", [](Rng& r) { return std::vector{random_param({2, 3}, r), random_param({2, 3}, r)}; },
                  [](const auto& in) { return mul(in[0], in[1]); });
  check_primitive("scale", [](Rng& r) { return std::vector{random_param({4}, r)}; },
                  [](const auto& in) { return add_scalar(scale(in[0], -1.7), 0.3); });
  check_primitive("concat0", [](Rng& r) { return std::vector{random_param({2, 3}, r), random_param({1, 3}, r)}; },
                  [](const auto& in) { return concat({in[0], in[1]}, 0); });
  check_primitive("concat1", [](Rng& r) { return std::vector{random_param({2, 3}, r), random_param({2, 2}, r)}; },
                  [](const auto& in) { return concat({in[0], in[1]}, 1); });
  check_primitive("slice", [](Rng& r) { return std::vector{random_param({3, 4}, r)}; },
                  [](const auto& in) { return slice(in[0], 1, 1, 3); });
  check_primitive("reshape", [](Rng& r) { return std::vector{random_param({3, 4}, r)}; },
                  [](const auto& in) { return reshape(in[0], {2, 6}); });
  check_primitive("gather", [](Rng& r) { return std::vector{random_param({4, 3}, r)}; }, [](const auto& in) {
    static const std::size_t idx[] = {3, 1, 3, 0};
    return gather_rows(in[0], idx);
  });
  check_primitive("sigmoid", [](Rng& r) { return std::vector{random_param({6}, r, -3, 3)}; },
                  [](const auto& in) { return sigmoid(in[0]); });
  check_primitive("tanh", [](Rng& r) { return std::vector{random_param({6}, r, -3, 3)}; },
                  [](const auto& in) { return tanh(in[0]); });
  // Keep relu inputs away from the kink.
  check_primitive("relu", [](Rng& r) { return std::vector{random_param({6}, r, 0.1, 2.0)}; },
                  [](const auto& in) { return relu(scale(in[0], -1.0)); });
  check_primitive("softmax0", [](Rng& r) { return std::vector{random_param({3, 4}, r, -2, 2)}; },
                  [](const auto& in) { return softmax(in[0], 0); });
  check_primitive("softmax1", [](Rng& r) { return std::vector{random_param({3, 4}, r, -2, 2)}; },
                  [](const auto& in) { return softmax(in[0], 1); });
  check_primitive("conv1d",
                  [](Rng& r) { return std::vector{random_param({5, 3}, r), random_param({2, 2, 3}, r), random_param({2}, r)}; },
                  [](const auto& in) { return conv1d(in[0], in[1], in[2]); });
  check_primitive("maxpool", [](Rng& r) { return std::vector{random_param({4, 3}, r)}; },
                  [](const auto& in) { return maxpool1d(in[0], 3); });
  check_primitive("sum", [](Rng& r) { return std::vector{random_param({2, 2}, r)}; },
                  [](const auto& in) { return sum(in[0]); });
  check_primitive("mean", [](Rng& r) { return std::vector{random_param({2, 3}, r)}; },
                  [](const auto& in) { return concat({reshape(mean(in[0]), {1}), mean(in[0], 0)}, 0); });
  check_primitive("l2_norm", [](Rng& r) { return std::vector{random_param({5}, r)}; },
                  [](const auto& in) { return l2_norm(in[0]); });
  check_primitive("softmax_xent", [](Rng& r) { return std::vector{random_param({6}, r, -2, 2)}; },
                  [](const auto& in) { return softmax_cross_entropy(in[0], 4); });
  check_primitive("nll", [](Rng& r) { return std::vector{random_param({6}, r, 0.1, 1.0)}; },
                  [](const auto& in) { return nll(in[0], 2); });
}

TEST_CASE("softmax is a distribution along its axis") {
  Rng rng = derive_rng(7, "softmax.prop");
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor x = Tensor::constant({3, 5}, uniform_values(15, -30.0, 30.0, rng));
    const Tensor y = softmax(x, 1);
    for (std::size_t r = 0; r < 3; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < 5; ++c) {
        CHECK(y[r * 5 + c] >= 0.0);
        total += y[r * 5 + c];
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("conv1d with a one-hot kernel reproduces a shifted slice") {
  Rng rng = derive_rng(3, "conv.onehot");
  const Tensor x = Tensor::constant({6, 4}, uniform_values(24, -1.0, 1.0, rng));
  // Width 3; the single nonzero tap picks row offset 2, channel 1.
  std::vector<double> k(3 * 4, 0.0);
  k[2 * 4 + 1] = 1.0;
  const Tensor y = conv1d(x, Tensor::constant({1, 3, 4}, k));
  REQUIRE(y.shape() == Shape{4, 1});
  for (std::size_t t = 0; t < 4; ++t) CHECK(y[t] == x[(t + 2) * 4 + 1]);
}

TEST_CASE("maxpool ignores rows beyond the valid prefix") {
  const Tensor x = Tensor::constant({3, 2}, {1, 5, 2, 0, 9, 9});
  CHECK(maxpool1d(x, 2).to_vector() == std::vector<double>{2, 5});
  CHECK(maxpool1d(x).to_vector() == std::vector<double>{9, 9});
}

TEST_CASE("fused cross-entropy gradient is probs minus one-hot") {
  Rng rng = derive_rng(11, "xent");
  const Tensor z = Tensor::parameter({6}, uniform_values(6, -2.0, 2.0, rng));
  const Tensor p = softmax(Tensor::constant({6}, z.to_vector()), 0);
  backward(softmax_cross_entropy(z, 3));
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(z.grad()[i] - (p[i] - (i == 3 ? 1.0 : 0.0))) < 1e-10);
}
