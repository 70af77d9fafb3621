#include "sccl/gru.hpp"

#include <cmath>
#include <vector>

#include "sccl/error.hpp"
#include "sccl/ops.hpp"
#include "sccl/random.hpp"

namespace sccl::gru {

namespace {

Tensor init_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, const std::string& name) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Rng rng = derive_rng(seed, name);
  return Tensor::parameter({rows, cols}, uniform_values(rows * cols, -bound, bound, rng));
}

Tensor gate(const Tensor& W, const Tensor& b, const Tensor& in) {
  Tensor pre = matmul(W, in);
  return b.defined() ? add(pre, b) : pre;
}

}  // namespace

GruParams init_params(std::size_t hidden, std::size_t input, std::uint64_t seed, const std::string& prefix,
                      bool with_bias) {
  GruParams p;
  p.hidden = hidden;
  p.input = input;
  p.Wz = init_matrix(hidden, hidden + input, seed, prefix + ".Wz");
  p.Wr = init_matrix(hidden, hidden + input, seed, prefix + ".Wr");
  p.W = init_matrix(hidden, hidden + input, seed, prefix + ".W");
  if (with_bias) {
    p.bz = Tensor::parameter({hidden}, std::vector<double>(hidden, 0.0));
    p.br = Tensor::parameter({hidden}, std::vector<double>(hidden, 0.0));
    p.bh = Tensor::parameter({hidden}, std::vector<double>(hidden, 0.0));
  }
  return p;
}

void register_params(ParameterSet& set, const std::string& prefix, const GruParams& p) {
  set.add(prefix + ".Wz", p.Wz);
  set.add(prefix + ".Wr", p.Wr);
  set.add(prefix + ".W", p.W);
  if (p.has_bias()) {
    set.add(prefix + ".bz", p.bz);
    set.add(prefix + ".br", p.br);
    set.add(prefix + ".bh", p.bh);
  }
}

Tensor step(const Tensor& x, const Tensor& h_prev, const GruParams& p) {
  if (x.rank() != 1 || h_prev.rank() != 1 || x.dim(0) != p.input || h_prev.dim(0) != p.hidden) {
    throw ShapeError("gru_step: input " + shape_str(x.shape()) + " and state " + shape_str(h_prev.shape()) +
                     " do not match a cell with hidden " + std::to_string(p.hidden) + ", input " +
                     std::to_string(p.input));
  }
  const Tensor hx = concat({h_prev, x}, 0);
  const Tensor z = sigmoid(gate(p.Wz, p.bz, hx));
  const Tensor r = sigmoid(gate(p.Wr, p.br, hx));
  const Tensor h_tilde = tanh(gate(p.W, p.bh, concat({mul(r, h_prev), x}, 0)));
  const Tensor keep = add_scalar(scale(z, -1.0), 1.0);
  return add(mul(keep, h_prev), mul(z, h_tilde));
}

Tensor sequence(const Tensor& X, const GruParams& p, Direction dir) {
  if (X.rank() != 2 || X.dim(1) != p.input) {
    throw ShapeError("gru_sequence: input " + shape_str(X.shape()) + " does not have width " +
                     std::to_string(p.input));
  }
  const std::size_t len = X.dim(0);
  if (len == 0) throw ShapeError("gru_sequence: empty sequence");
  std::vector<Tensor> states(len);
  Tensor h = Tensor::zeros({p.hidden});
  for (std::size_t k = 0; k < len; ++k) {
    const std::size_t t = dir == Direction::Forward ? k : len - 1 - k;
    h = step(reshape(slice(X, 0, t, t + 1), {p.input}), h, p);
    states[t] = reshape(h, {1, p.hidden});
  }
  return concat(states, 0);
}

BiGruParams init_bidirectional(std::size_t hidden, std::size_t input, std::uint64_t seed, bool with_bias) {
  return {init_params(hidden, input, seed, "gru.fwd", with_bias),
          init_params(hidden, input, seed, "gru.bwd", with_bias)};
}

void register_params(ParameterSet& set, const BiGruParams& p) {
  register_params(set, "gru.fwd", p.fwd);
  register_params(set, "gru.bwd", p.bwd);
}

Tensor bidirectional(const Tensor& X, const BiGruParams& p) {
  if (p.fwd.hidden != p.bwd.hidden || p.fwd.input != p.bwd.input) {
    throw ShapeError("bigru: forward and backward cells differ in shape");
  }
  return concat({sequence(X, p.fwd, Direction::Forward), sequence(X, p.bwd, Direction::Backward)}, 1);
}

}  // namespace sccl::gru
