#include "sccl/capsule.hpp"

#include <cmath>
#include <string>

#include "sccl/error.hpp"
#include "sccl/ops.hpp"
#include "sccl/random.hpp"

namespace sccl::capsule {

Tensor form_primary_capsules(const Tensor& features, std::size_t d_in) {
  const std::size_t n = features.size();
  if (d_in == 0 || n % d_in != 0) {
    throw ConfigError("capsules: feature map " + shape_str(features.shape()) + " (" + std::to_string(n) +
                      " values) cannot be cut into capsules of width " + std::to_string(d_in));
  }
  return reshape(features, {n / d_in, d_in});
}

Tensor init_weights(std::size_t n_in, const CapsuleConfig& cfg, std::uint64_t seed) {
  const std::size_t lead = cfg.share_weights ? 1 : n_in;
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.d_in));
  Rng rng = derive_rng(seed, "caps.W");
  return Tensor::parameter({lead, cfg.n_out, cfg.d_out, cfg.d_in},
                           uniform_values(lead * cfg.n_out * cfg.d_out * cfg.d_in, -bound, bound, rng));
}

Tensor affine_predict(const Tensor& u, const Tensor& W) {
  if (u.rank() != 2 || W.rank() != 4 || W.dim(3) != u.dim(1) || (W.dim(0) != u.dim(0) && W.dim(0) != 1)) {
    throw ShapeError("affine_predict: capsules " + shape_str(u.shape()) + " incompatible with transforms " +
                     shape_str(W.shape()));
  }
  const std::size_t n_in = u.dim(0), d_in = u.dim(1);
  const std::size_t n_out = W.dim(1), d_out = W.dim(2);
  const bool shared = W.dim(0) == 1;
  auto uv = u.data();
  auto wv = W.data();
  const std::size_t block = n_out * d_out * d_in;
  std::vector<double> out(n_in * n_out * d_out, 0.0);
  for (std::size_t i = 0; i < n_in; ++i) {
    const double* ui = uv.data() + i * d_in;
    const double* wi = wv.data() + (shared ? 0 : i * block);
    double* oi = out.data() + i * n_out * d_out;
    for (std::size_t r = 0; r < n_out * d_out; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d_in; ++k) acc += wi[r * d_in + k] * ui[k];
      oi[r] = acc;
    }
  }
  return record("affine_predict", Shape{n_in, n_out, d_out}, std::move(out), {u, W},
                [n_in, d_in, n_out, d_out, shared, block](const detail::AdjointContext& ctx) {
                  auto uv = ctx.input_value(0);
                  auto wv = ctx.input_value(1);
                  const bool gu_on = ctx.wants(0), gw_on = ctx.wants(1);
                  std::span<double> gu, gw;
                  if (gu_on) gu = ctx.input_grad(0);
                  if (gw_on) gw = ctx.input_grad(1);
                  for (std::size_t i = 0; i < n_in; ++i) {
                    const std::size_t woff = shared ? 0 : i * block;
                    for (std::size_t r = 0; r < n_out * d_out; ++r) {
                      const double g = ctx.grad[i * n_out * d_out + r];
                      for (std::size_t k = 0; k < d_in; ++k) {
                        if (gu_on) gu[i * d_in + k] += g * wv[woff + r * d_in + k];
                        if (gw_on) gw[woff + r * d_in + k] += g * uv[i * d_in + k];
                      }
                    }
                  }
                });
}

Tensor squash(const Tensor& s) {
  if (s.rank() != 1 && s.rank() != 2) throw ShapeError("squash: expected a vector or matrix, got " + shape_str(s.shape()));
  const std::size_t width = s.rank() == 1 ? s.dim(0) : s.dim(1);
  const std::size_t rows = s.size() / width;
  auto sv = s.data();
  std::vector<double> out(s.size());
  std::vector<double> norms(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double sq = 0.0;
    for (std::size_t k = 0; k < width; ++k) sq += sv[r * width + k] * sv[r * width + k];
    const double n = std::sqrt(sq);
    norms[r] = n;
    const double factor = n / (1.0 + sq);
    for (std::size_t k = 0; k < width; ++k) out[r * width + k] = factor * sv[r * width + k];
  }
  return record("squash", s.shape(), std::move(out), {s},
                [rows, width, norms = std::move(norms)](const detail::AdjointContext& ctx) {
                  if (!ctx.wants(0)) return;
                  auto sv = ctx.input_value(0);
                  auto gs = ctx.input_grad(0);
                  for (std::size_t r = 0; r < rows; ++r) {
                    // v = s g(n), g(n) = n / (1 + n^2), g'(n) = (1 - n^2) / (1 + n^2)^2
                    const double n = norms[r];
                    const double q = 1.0 + n * n;
                    const double g = n / q;
                    double dot = 0.0;
                    for (std::size_t k = 0; k < width; ++k) dot += ctx.grad[r * width + k] * sv[r * width + k];
                    const double radial = n > 0.0 ? (1.0 - n * n) / (q * q * n) * dot : 0.0;
                    for (std::size_t k = 0; k < width; ++k) {
                      gs[r * width + k] += g * ctx.grad[r * width + k] + radial * sv[r * width + k];
                    }
                  }
                });
}

Tensor weighted_votes(const Tensor& couplings, const Tensor& u_hat) {
  if (couplings.rank() != 2 || u_hat.rank() != 3 || couplings.dim(0) != u_hat.dim(0) ||
      couplings.dim(1) != u_hat.dim(1)) {
    throw ShapeError("weighted_votes: couplings " + shape_str(couplings.shape()) + " incompatible with votes " +
                     shape_str(u_hat.shape()));
  }
  const std::size_t n_in = u_hat.dim(0), n_out = u_hat.dim(1), d = u_hat.dim(2);
  auto c = couplings.data();
  auto u = u_hat.data();
  std::vector<double> out(n_out * d, 0.0);
  for (std::size_t i = 0; i < n_in; ++i)
    for (std::size_t j = 0; j < n_out; ++j) {
      const double cij = c[i * n_out + j];
      for (std::size_t k = 0; k < d; ++k) out[j * d + k] += cij * u[(i * n_out + j) * d + k];
    }
  return record("weighted_votes", Shape{n_out, d}, std::move(out), {couplings, u_hat},
                [n_in, n_out, d](const detail::AdjointContext& ctx) {
                  auto c = ctx.input_value(0);
                  auto u = ctx.input_value(1);
                  if (ctx.wants(0)) {
                    auto gc = ctx.input_grad(0);
                    for (std::size_t i = 0; i < n_in; ++i)
                      for (std::size_t j = 0; j < n_out; ++j) {
                        double acc = 0.0;
                        for (std::size_t k = 0; k < d; ++k) acc += ctx.grad[j * d + k] * u[(i * n_out + j) * d + k];
                        gc[i * n_out + j] += acc;
                      }
                  }
                  if (ctx.wants(1)) {
                    auto gu = ctx.input_grad(1);
                    for (std::size_t i = 0; i < n_in; ++i)
                      for (std::size_t j = 0; j < n_out; ++j)
                        for (std::size_t k = 0; k < d; ++k)
                          gu[(i * n_out + j) * d + k] += c[i * n_out + j] * ctx.grad[j * d + k];
                  }
                });
}

Tensor agreement(const Tensor& u_hat, const Tensor& v) {
  if (u_hat.rank() != 3 || v.rank() != 2 || v.dim(0) != u_hat.dim(1) || v.dim(1) != u_hat.dim(2)) {
    throw ShapeError("agreement: votes " + shape_str(u_hat.shape()) + " incompatible with outputs " +
                     shape_str(v.shape()));
  }
  const std::size_t n_in = u_hat.dim(0), n_out = u_hat.dim(1), d = u_hat.dim(2);
  auto u = u_hat.data();
  auto vv = v.data();
  std::vector<double> out(n_in * n_out, 0.0);
  for (std::size_t i = 0; i < n_in; ++i)
    for (std::size_t j = 0; j < n_out; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += u[(i * n_out + j) * d + k] * vv[j * d + k];
      out[i * n_out + j] = acc;
    }
  return record("agreement", Shape{n_in, n_out}, std::move(out), {u_hat, v},
                [n_in, n_out, d](const detail::AdjointContext& ctx) {
                  auto u = ctx.input_value(0);
                  auto vv = ctx.input_value(1);
                  const bool gu_on = ctx.wants(0), gv_on = ctx.wants(1);
                  std::span<double> gu, gv;
                  if (gu_on) gu = ctx.input_grad(0);
                  if (gv_on) gv = ctx.input_grad(1);
                  for (std::size_t i = 0; i < n_in; ++i)
                    for (std::size_t j = 0; j < n_out; ++j) {
                      const double g = ctx.grad[i * n_out + j];
                      for (std::size_t k = 0; k < d; ++k) {
                        if (gu_on) gu[(i * n_out + j) * d + k] += g * vv[j * d + k];
                        if (gv_on) gv[j * d + k] += g * u[(i * n_out + j) * d + k];
                      }
                    }
                });
}

Tensor dynamic_routing(const Tensor& u_hat, std::size_t iters, RoutingTrace* trace) {
  if (iters < 1) throw ConfigError("dynamic_routing: at least one iteration is required");
  if (u_hat.rank() != 3) throw ShapeError("dynamic_routing: votes must be N_in x N_out x d, got " + shape_str(u_hat.shape()));
  Tensor logits = Tensor::zeros({u_hat.dim(0), u_hat.dim(1)});
  Tensor v;
  for (std::size_t it = 0; it < iters; ++it) {
    const Tensor c = softmax(logits, 1);
    if (trace) trace->couplings.push_back(c.to_vector());
    v = squash(weighted_votes(c, u_hat));
    if (it + 1 < iters) logits = add(logits, agreement(u_hat, v));
  }
  return v;
}

}  // namespace sccl::capsule
