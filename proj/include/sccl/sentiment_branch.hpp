#pragma once

#include <cstdint>
#include <vector>

#include "sccl/embedding.hpp"
#include "sccl/lexicon.hpp"
#include "sccl/optim.hpp"
#include "sccl/tensor.hpp"

namespace sccl::sentiment {

struct SentBranchConfig {
  std::vector<std::size_t> kernel_widths{2, 3};
  std::size_t filters = 8;
};

struct SentBranchParams {
  std::vector<std::size_t> widths;
  std::vector<Tensor> kernels;  // per width: filters x width x embed
  std::vector<Tensor> biases;   // per width: filters
  Tensor out_W;                 // classes x (filters * |widths|); undefined when features feed fusion
  Tensor out_b;                 // classes

  std::size_t feature_size() const;
};

/// classes == 0 leaves out the classifier.
SentBranchParams init_params(const SentBranchConfig& cfg, std::size_t embed_width, std::size_t classes,
                             std::uint64_t seed);

/// Registers `sent.conv<k>.W`, `sent.conv<k>.b`, `sent.out.W`, `sent.out.b`.
void register_params(ParameterSet& set, const SentBranchParams& p);

struct SentBranchOutput {
  Tensor features;  // pooled conv features, filters * |widths|
  Tensor logits;  // undefined without a classifier
  Tensor probs;
};

/// Conv + masked global max-pool per kernel width over an embedded sequence
/// (rows beyond `true_len` are padding), then affine + softmax. A window is
/// pooled only when it lies inside the true sequence; a sequence shorter than
/// a kernel keeps just the first window.
SentBranchOutput forward(const Tensor& embedded, std::size_t true_len, const SentBranchParams& p);

/// Embeds `seq` (right-padded to `max_len`) through `words` and runs forward().
SentBranchOutput forward(const SentimentSeq& seq, const TableEmbedder& words, std::size_t max_len,
                         const SentBranchParams& p);

}  // namespace sccl::sentiment
