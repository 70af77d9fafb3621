#include "sccl/sentiment_branch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sccl/error.hpp"
#include "sccl/ops.hpp"
#include "sccl/random.hpp"

namespace sccl::sentiment {

std::size_t SentBranchParams::feature_size() const {
  std::size_t n = 0;
  for (const auto& k : kernels) n += k.dim(0);
  return n;
}

SentBranchParams init_params(const SentBranchConfig& cfg, std::size_t embed_width, std::size_t classes,
                             std::uint64_t seed) {
  if (cfg.kernel_widths.empty() || cfg.filters == 0) throw ConfigError("sentiment branch needs kernels");
  SentBranchParams p;
  p.widths = cfg.kernel_widths;
  for (auto w : cfg.kernel_widths) {
    if (w == 0) throw ConfigError("sentiment branch: kernel width must be positive");
    const std::string name = "sent.conv" + std::to_string(w);
    const double bound = 1.0 / std::sqrt(static_cast<double>(w * embed_width));
    Rng rng = derive_rng(seed, name + ".W");
    p.kernels.push_back(
        Tensor::parameter({cfg.filters, w, embed_width}, uniform_values(cfg.filters * w * embed_width, -bound, bound, rng)));
    p.biases.push_back(Tensor::parameter({cfg.filters}, std::vector<double>(cfg.filters, 0.0)));
  }
  const std::size_t features = cfg.filters * cfg.kernel_widths.size();
  if (classes == 0) return p;
  const double bound = 1.0 / std::sqrt(static_cast<double>(features));
  Rng rng = derive_rng(seed, "sent.out.W");
  p.out_W = Tensor::parameter({classes, features}, uniform_values(classes * features, -bound, bound, rng));
  p.out_b = Tensor::parameter({classes}, std::vector<double>(classes, 0.0));
  return p;
}

void register_params(ParameterSet& set, const SentBranchParams& p) {
  for (std::size_t k = 0; k < p.widths.size(); ++k) {
    const std::string name = "sent.conv" + std::to_string(p.widths[k]);
    set.add(name + ".W", p.kernels[k]);
    set.add(name + ".b", p.biases[k]);
  }
  if (p.out_W.defined()) {
    set.add("sent.out.W", p.out_W);
    set.add("sent.out.b", p.out_b);
  }
}

SentBranchOutput forward(const Tensor& embedded, std::size_t true_len, const SentBranchParams& p) {
  const std::size_t padded = embedded.dim(0);
  if (true_len == 0 || true_len > padded) {
    throw ShapeError("sentiment branch: true length " + std::to_string(true_len) + " outside padded length " +
                     std::to_string(padded));
  }
  std::vector<Tensor> pooled;
  pooled.reserve(p.kernels.size());
  for (std::size_t k = 0; k < p.kernels.size(); ++k) {
    const std::size_t w = p.widths[k];
    if (w > padded) {
      throw ConfigError("sentiment branch: kernel width " + std::to_string(w) + " exceeds padded length " +
                        std::to_string(padded));
    }
    const Tensor conv = conv1d(embedded, p.kernels[k], p.biases[k]);
    const std::size_t valid = true_len >= w ? true_len - w + 1 : 1;
    pooled.push_back(maxpool1d(conv, valid));
  }
  SentBranchOutput out;
  out.features = concat(pooled, 0);
  if (p.out_W.defined()) {
    out.logits = add(matmul(p.out_W, out.features), p.out_b);
    out.probs = softmax(out.logits, 0);
  }
  return out;
}

SentBranchOutput forward(const SentimentSeq& seq, const TableEmbedder& words, std::size_t max_len,
                         const SentBranchParams& p) {
  const Tensor embedded = words.embed(seq.words, max_len);
  return forward(embedded, std::min(seq.words.size(), max_len), p);
}

}  // namespace sccl::sentiment
