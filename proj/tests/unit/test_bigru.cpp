#include <cmath>

#include "doctest.h"
#include "sccl/error.hpp"
#include "sccl/gradcheck.hpp"
#include "sccl/gru.hpp"
#include "sccl/ops.hpp"
#include "sccl/random.hpp"

using namespace sccl;

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

Mat rows(const Tensor& W) {
  Mat m(W.dim(0), Vec(W.dim(1)));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] = W[i * W.dim(1) + j];
  return m;
}

Vec matvec(const Mat& W, const Vec& v) {
  Vec out(W.size(), 0.0);
  for (std::size_t i = 0; i < W.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += W[i][j] * v[j];
  return out;
}

Vec cat(const Vec& a, const Vec& b) {
  Vec out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Straight-line transcription of the gate equations.
Vec oracle_step(const Vec& x, const Vec& h, const gru::GruParams& p) {
  const Vec az = matvec(rows(p.Wz), cat(h, x)), ar = matvec(rows(p.Wr), cat(h, x));
  Vec z(h.size()), r(h.size()), rh(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    z[i] = 1.0 / (1.0 + std::exp(-az[i]));
    r[i] = 1.0 / (1.0 + std::exp(-ar[i]));
    rh[i] = r[i] * h[i];
  }
  const Vec ac = matvec(rows(p.W), cat(rh, x));
  Vec out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = (1.0 - z[i]) * h[i] + z[i] * std::tanh(ac[i]);
  return out;
}

gru::GruParams zero_params(std::size_t d, std::size_t e) {
  gru::GruParams p;
  p.hidden = d;
  p.input = e;
  p.Wz = Tensor::parameter({d, d + e}, Vec(d * (d + e), 0.0));
  p.Wr = Tensor::parameter({d, d + e}, Vec(d * (d + e), 0.0));
  p.W = Tensor::parameter({d, d + e}, Vec(d * (d + e), 0.0));
  return p;
}

Tensor reverse_rows(const Tensor& X) {
  std::vector<Tensor> parts;
  for (std::size_t t = X.dim(0); t > 0; --t) parts.push_back(slice(X, 0, t - 1, t));
  return concat(parts, 0);
}

Tensor random_input(std::size_t L, std::size_t e, std::uint64_t seed) {
  Rng rng = derive_rng(seed, "gru.input");
  return Tensor::constant({L, e}, uniform_values(L * e, -1.0, 1.0, rng));
}

}  // namespace

TEST_CASE("zero weights halve the previous state") {
  const auto p = zero_params(4, 3);
  const Tensor h = Tensor::constant({4}, {0.3, -1.7, 2.0, 1e-3});
  const Tensor out = gru::step(Tensor::constant({3}, {5.0, -5.0, 1.0}), h, p);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(out[i] - 0.5 * h[i]) <= 1e-15);
  const Tensor zero = gru::step(Tensor::constant({3}, {1, 2, 3}), Tensor::zeros({4}), p);
  for (double v : zero.data()) CHECK(v == 0.0);
}

TEST_CASE("step and sequence match the straight-line oracle") {
  const auto p = gru::init_params(3, 2, 5, "gru.fwd");
  Rng rng = derive_rng(1, "oracle");
  const Vec x = uniform_values(2, -1, 1, rng), h = uniform_values(3, -1, 1, rng);
  const Tensor got = gru::step(Tensor::constant({2}, x), Tensor::constant({3}, h), p);
  const Vec want = oracle_step(x, h, p);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);

  const Tensor X = random_input(4, 2, 2);
  const Tensor H = gru::sequence(X, p, gru::Direction::Forward);
  const Tensor B = gru::sequence(X, p, gru::Direction::Backward);
  Vec hf(3, 0.0), hb(3, 0.0);
  for (std::size_t t = 0; t < 4; ++t) {
    hf = oracle_step({X[t * 2], X[t * 2 + 1]}, hf, p);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(H[t * 3 + i] - hf[i]) < 1e-12);
  }
  for (std::size_t t = 4; t > 0; --t) {
    hb = oracle_step({X[(t - 1) * 2], X[(t - 1) * 2 + 1]}, hb, p);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(B[(t - 1) * 3 + i] - hb[i]) < 1e-12);
  }
}

TEST_CASE("backward direction is the row-reversed forward pass, bit for bit") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = gru::init_params(5, 3, seed, "gru.bwd");
    const Tensor X = random_input(1 + seed, 3, seed);
    const Tensor B = gru::sequence(X, p, gru::Direction::Backward);
    const Tensor F = reverse_rows(gru::sequence(reverse_rows(X), p, gru::Direction::Forward));
    CHECK(B.to_vector() == F.to_vector());
  }
}

TEST_CASE("length one is direction independent") {
  const auto p = gru::init_params(3, 2, 0, "gru.fwd");
  const Tensor X = random_input(1, 2, 4);
  CHECK(gru::sequence(X, p, gru::Direction::Forward).to_vector() ==
        gru::sequence(X, p, gru::Direction::Backward).to_vector());
}

TEST_CASE("shape errors") {
  const auto p = gru::init_params(3, 2, 0, "gru.fwd");
  CHECK_THROWS_AS(gru::step(Tensor::zeros({3}), Tensor::zeros({3}), p), ShapeError);
  CHECK_THROWS_AS(gru::sequence(Tensor::zeros({4, 3}), p, gru::Direction::Forward), ShapeError);
  CHECK_THROWS_AS(gru::sequence(Tensor::zeros({0, 2}), p, gru::Direction::Forward), ShapeError);
}

TEST_CASE("bidirectional output shape and direction independence") {
  const auto p = gru::init_bidirectional(4, 3, 9);
  for (std::size_t L : {1u, 2u, 7u}) CHECK(gru::bidirectional(random_input(L, 3, L), p).shape() == Shape{L, 8});

  const Tensor X = random_input(5, 3, 1);
  const Tensor before = gru::bidirectional(X, p);
  auto bwd = p.bwd.W;
  bwd.mutable_data()[0] += 0.5;
  const Tensor after = gru::bidirectional(X, p);
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t i = 0; i < 4; ++i) CHECK(before[t * 8 + i] == after[t * 8 + i]);
  }
  CHECK(before.to_vector() != after.to_vector());
}

TEST_CASE("palindromic constant input with shared weights mirrors the two directions") {
  const auto one = gru::init_params(3, 2, 4, "gru.fwd");
  const gru::BiGruParams p{one, one};
  const Tensor X = Tensor::constant({6, 2}, Vec(12, 0.4));
  const Tensor H = gru::bidirectional(X, p);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < 3; ++i) CHECK(H[t * 6 + i] == H[(5 - t) * 6 + 3 + i]);
}

TEST_CASE("gates stay in (0,1) and the state is a coordinatewise convex combination") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = gru::init_params(4, 3, seed, "gru.fwd");
    Rng rng = derive_rng(seed, "convex");
    const Vec x = uniform_values(3, -3, 3, rng), h = uniform_values(4, -1, 1, rng);
    const Vec az = matvec(rows(p.Wz), cat(h, x));
    Vec rh(4);
    for (std::size_t i = 0; i < 4; ++i) {
      const double z = 1.0 / (1.0 + std::exp(-az[i]));
      CHECK(z > 0.0);
      CHECK(z < 1.0);
    }
    const Vec ar = matvec(rows(p.Wr), cat(h, x));
    for (std::size_t i = 0; i < 4; ++i) rh[i] = h[i] / (1.0 + std::exp(-ar[i]));
    const Vec cand = matvec(rows(p.W), cat(rh, x));
    const Tensor out = gru::step(Tensor::constant({3}, x), Tensor::constant({4}, h), p);
    for (std::size_t i = 0; i < 4; ++i) {
      const double ht = std::tanh(cand[i]);
      CHECK(out[i] >= std::min(h[i], ht) - 1e-15);
      CHECK(out[i] <= std::max(h[i], ht) + 1e-15);
    }
  }
}

TEST_CASE("gradient through the BiGRU matches finite differences") {
  const auto p = gru::init_bidirectional(3, 2, 11);
  ParameterSet set;
  gru::register_params(set, p);
  CHECK(set.contains("gru.fwd.Wz"));
  CHECK(set.contains("gru.bwd.W"));
  const Tensor X = Tensor::parameter({5, 2}, random_input(5, 2, 3).to_vector());
  set.add("input", X);
  Rng rng = derive_rng(0, "bigru.proj");
  const Tensor r = Tensor::constant({5, 6}, uniform_values(30, -1, 1, rng));
  const auto res = finite_difference_check([&] { return sum(mul(gru::bidirectional(X, p), r)); }, set, 1e-5);
  CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("optional biases enter every gate") {
  const auto p = gru::init_params(2, 2, 0, "gru.fwd", true);
  CHECK(p.has_bias());
  ParameterSet set;
  gru::register_params(set, "gru.fwd", p);
  CHECK(set.contains("gru.fwd.bh"));
  const Tensor X = random_input(3, 2, 1);
  const auto res = finite_difference_check(
      [&] { return sum(gru::sequence(X, p, gru::Direction::Forward)); }, set, 1e-5);
  CHECK(res.max_rel_error < 1e-4);
}
