#include <cmath>

#include "doctest.h"
#include "sccl/error.hpp"
#include "sccl/gradcheck.hpp"
#include "sccl/ops.hpp"
#include "sccl/random.hpp"
#include "sccl/sentiment_branch.hpp"

using namespace sccl;
using namespace sccl::sentiment;

namespace {

TableEmbedder word_table(std::uint64_t seed = 0) {
  const Vocab v = Vocab::from_symbols({"美", "糟糕", "开心", "难过"});
  return TableEmbedder(v, make_embedding_table(v.size(), 4, 0.5, seed, "embed.word"));
}

SentimentSeq seq_of(std::vector<std::string> words) {
  SentimentSeq s;
  s.words = std::move(words);
  s.polarity.assign(s.words.size(), 1);
  return s;
}

}  // namespace

TEST_CASE("output is a distribution for any sequence, including the sentinel") {
  const auto emb = word_table();
  const auto p = init_params({}, 4, 6, 0);
  for (const auto& words : std::vector<std::vector<std::string>>{
           {"美"}, {"美", "糟糕"}, {"开心", "难过", "美", "美", "糟糕", "开心", "x"}, {std::string(kNullSentiment)}}) {
    const auto out = forward(seq_of(words), emb, 5, p);
    CHECK(out.probs.size() == 6);
    CHECK(out.features.size() == 16);
    double total = 0.0;
    for (double v : out.probs.data()) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  const auto a = forward(seq_of({std::string(kNullSentiment)}), emb, 5, p);
  const auto b = forward(seq_of({std::string(kNullSentiment)}), emb, 5, p);
  CHECK(a.probs.to_vector() == b.probs.to_vector());
}

TEST_CASE("one-hot width-1 kernel pools the largest embedding coordinate") {
  SentBranchParams p;
  p.widths = {1};
  p.kernels = {Tensor::parameter({1, 1, 3}, {0.0, 1.0, 0.0})};
  p.biases = {Tensor::parameter({1}, {0.0})};
  const Tensor E = Tensor::constant({4, 3}, {0.1, 0.5, 0.0,   //
                                             0.2, 2.5, 0.0,   //
                                             0.3, -1.0, 0.0,  //
                                             0.0, 9.0, 0.0});
  CHECK(forward(E, 3, p).features[0] == 2.5);  // row 4 is padding
  CHECK(forward(E, 4, p).features[0] == 9.0);
}

TEST_CASE("trailing padding does not change the output") {
  const auto emb = word_table(3);
  const auto p = init_params({}, 4, 6, 1);
  const auto seq = seq_of({"美", "难过", "开心"});
  const auto ref = forward(seq, emb, 3, p).probs.to_vector();
  for (std::size_t max_len : {4u, 6u, 10u}) CHECK(forward(seq, emb, max_len, p).probs.to_vector() == ref);
  // A sequence shorter than the widest kernel keeps exactly its first window.
  const auto short_seq = seq_of({"美"});
  CHECK(forward(short_seq, emb, 3, p).probs.to_vector() == forward(short_seq, emb, 8, p).probs.to_vector());
}

TEST_CASE("permuting filters permutes features; permuting classifier columns alongside keeps the output") {
  const auto emb = word_table(2);
  const auto p = init_params({.kernel_widths = {2}, .filters = 3}, 4, 6, 4);
  const auto seq = seq_of({"美", "糟糕", "难过"});
  const auto ref = forward(seq, emb, 4, p);

  const std::vector<std::size_t> perm{2, 0, 1};
  SentBranchParams q = p;
  std::vector<double> k, b, w(6 * 3);
  const auto kd = p.kernels[0].data();
  for (auto f : perm) {
    k.insert(k.end(), kd.begin() + f * 8, kd.begin() + (f + 1) * 8);
    b.push_back(p.biases[0][f]);
  }
  for (std::size_t c = 0; c < 6; ++c)
    for (std::size_t n = 0; n < 3; ++n) w[c * 3 + n] = p.out_W[c * 3 + perm[n]];
  q.kernels = {Tensor::parameter({3, 2, 4}, k)};
  q.biases = {Tensor::parameter({3}, b)};
  q.out_W = Tensor::parameter({6, 3}, w);
  const auto got = forward(seq, emb, 4, q);
  for (std::size_t n = 0; n < 3; ++n) CHECK(got.features[n] == ref.features[perm[n]]);
  for (std::size_t c = 0; c < 6; ++c) CHECK(std::abs(got.probs[c] - ref.probs[c]) < 1e-15);
}

TEST_CASE("gradient through conv, pooling and softmax") {
  const auto emb = word_table(5);
  const auto p = init_params({}, 4, 6, 2);
  ParameterSet set;
  register_params(set, p);
  set.add("embed.word", emb.table().weights);
  CHECK(set.contains("sent.conv2.W"));
  CHECK(set.contains("sent.out.b"));
  const auto seq = seq_of({"开心", "糟糕", "美"});
  const auto res = finite_difference_check([&] { return nll(forward(seq, emb, 5, p).probs, 3); }, set, 1e-5);
  CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(init_params({.kernel_widths = {}, .filters = 2}, 4, 6, 0), ConfigError);
  const auto p = init_params({.kernel_widths = {5}, .filters = 2}, 4, 6, 0);
  CHECK_THROWS_AS(forward(seq_of({"美"}), word_table(), 3, p), ConfigError);
  const auto headless = init_params({}, 4, 0, 0);
  CHECK_FALSE(headless.out_W.defined());
  CHECK_FALSE(forward(seq_of({"美"}), word_table(), 4, headless).probs.defined());
}
