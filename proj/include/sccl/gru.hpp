#pragma once

#include <cstdint>
#include <string>

#include "sccl/optim.hpp"
#include "sccl/tensor.hpp"

namespace sccl::gru {

/// Gate weights act on the concatenation [h_prev ; x_t], so each matrix is
/// hidden x (hidden + input). Biases are empty tensors unless enabled.
struct GruParams {
  Tensor Wz;
  Tensor Wr;
  Tensor W;
  Tensor bz;
  Tensor br;
  Tensor bh;
  std::size_t hidden = 0;
  std::size_t input = 0;

  bool has_bias() const { return bz.defined(); }
};

/// U(-1/sqrt(hidden + input), 1/sqrt(hidden + input)) per matrix, seeded by
/// `prefix` (e.g. "gru.fwd"); biases start at zero.
GruParams init_params(std::size_t hidden, std::size_t input, std::uint64_t seed, const std::string& prefix,
                      bool with_bias = false);

/// Registers tensors as `<prefix>.{Wz,Wr,W}` (and `<prefix>.{bz,br,bh}`).
void register_params(ParameterSet& set, const std::string& prefix, const GruParams& p);

/// z = sigma(Wz [h;x]), r = sigma(Wr [h;x]), h~ = tanh(W [r*h;x]),
/// h' = (1 - z) * h + z * h~
Tensor step(const Tensor& x, const Tensor& h_prev, const GruParams& p);

enum class Direction { Forward, Backward };

/// Runs the cell over the rows of X (L x input) from a zero state. The
/// backward direction visits rows L..1 but stores each state at its own row.
Tensor sequence(const Tensor& X, const GruParams& p, Direction dir);

struct BiGruParams {
  GruParams fwd;
  GruParams bwd;
};

BiGruParams init_bidirectional(std::size_t hidden, std::size_t input, std::uint64_t seed, bool with_bias = false);
void register_params(ParameterSet& set, const BiGruParams& p);

/// H_t = [h_fwd_t ; h_bwd_t], giving L x 2*hidden.
Tensor bidirectional(const Tensor& X, const BiGruParams& p);

}  // namespace sccl::gru
