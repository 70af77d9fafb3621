#pragma once

#include <cstdint>
#include <vector>

#include "sccl/optim.hpp"
#include "sccl/tensor.hpp"

namespace sccl::capsule {

struct CapsuleConfig {
  std::size_t n_out = 8;
  std::size_t d_in = 8;
  std::size_t d_out = 16;
  std::size_t iters = 3;
  /// One transform per output capsule shared by all inputs, instead of one
  /// per (input, output) pair.
  bool share_weights = false;
};

/// Row-major flatten of a feature map cut into contiguous blocks of `d_in`,
/// giving N_in x d_in. Throws ConfigError when the size is not divisible.
Tensor form_primary_capsules(const Tensor& features, std::size_t d_in);

/// Affine tensor of shape N_in x N_out x d_out x d_in (leading extent 1 when
/// shared), U(-1/sqrt(d_in), 1/sqrt(d_in)).
Tensor init_weights(std::size_t n_in, const CapsuleConfig& cfg, std::uint64_t seed);

/// u_hat[i][j] = W_ij u_i, shape N_in x N_out x d_out. No bias.
Tensor affine_predict(const Tensor& u, const Tensor& W);

/// v = |s|^2 / (1 + |s|^2) * s / |s|, applied to a vector or to each row of a
/// matrix. Evaluated as s * |s| / (1 + |s|^2), which is the same map with
/// no singularity: v(0) = 0 and the adjoint stays finite.
Tensor squash(const Tensor& s);

/// s_j = sum_i c_ij u_hat[i][j]; couplings N_in x N_out -> N_out x d_out.
Tensor weighted_votes(const Tensor& couplings, const Tensor& u_hat);

/// a_ij = u_hat[i][j] . v_j; N_in x N_out.
Tensor agreement(const Tensor& u_hat, const Tensor& v);

struct RoutingTrace {
  /// Coupling matrices (N_in x N_out, row-major) of every iteration.
  std::vector<std::vector<double>> couplings;
};

/// Routing by agreement from zero logits: each iteration takes
/// c = softmax_j(b), s = weighted_votes(c, u_hat), v = squash(s), and then
/// b += agreement(u_hat, v) before the next one. Returns v (N_out x d_out)
/// of the last iteration. Gradients flow through the couplings.
Tensor dynamic_routing(const Tensor& u_hat, std::size_t iters, RoutingTrace* trace = nullptr);

}  // namespace sccl::capsule
