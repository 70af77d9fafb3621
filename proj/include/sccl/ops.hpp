#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sccl/tensor.hpp"

// Differentiable primitives. Every function records its adjoint on the
// dynamic graph and throws ShapeError (naming itself and the offending
// shapes) on incompatible inputs.
namespace sccl {

/// (m x k)(k x n) -> (m x n), or (m x k)(k) -> (m).
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& x, Shape shape);

/// Rows of a (V x e) table selected by index, giving (n x e).
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor softmax(const Tensor& x, std::size_t axis);

/// Valid-padding 1-D convolution: input (L x C), kernels (F x k x C),
/// optional bias (F) -> (L-k+1 x F).
Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias = {});

/// Column-wise maximum over the first `valid_rows` rows of a (R x C) input;
/// later rows are masked out. valid_rows == 0 means all rows.
Tensor maxpool1d(const Tensor& x, std::size_t valid_rows = 0);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// Mean along one axis, removing it.
Tensor mean(const Tensor& x, std::size_t axis);
/// Euclidean norm of all entries; the adjoint at zero is taken as zero.
Tensor l2_norm(const Tensor& x);

/// -log softmax(logits)[label], fused so the logit adjoint is probs - onehot.
Tensor softmax_cross_entropy(const Tensor& logits, std::size_t label);

/// -log(max(probs[label], eps)).
Tensor nll(const Tensor& probs, std::size_t label, double eps = 1e-12);

}  // namespace sccl
