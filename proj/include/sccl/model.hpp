#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sccl/capsule.hpp"
#include "sccl/corpus.hpp"
#include "sccl/embedding.hpp"
#include "sccl/gradcheck.hpp"
#include "sccl/gru.hpp"
#include "sccl/lexicon.hpp"
#include "sccl/optim.hpp"
#include "sccl/sentiment_branch.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

enum class FusionMode { Average, Concat };
enum class TextHead { Capsule, MeanPool };

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::size_t checkpoint_every = 0;  // epochs; 0 disables intermediate checkpoints
};

struct DataConfig {
  double test_fraction = 0.1;
  bool stratified = false;
  std::size_t char_min_count = 1;
  std::size_t word_min_count = 1;
  std::size_t stats_min_count = 1;   // co-occurrence cutoff for lexicon expansion
  bool stats_on_train_only = true;   // expand from the training split only
};

struct ModelConfig {
  std::string variant = "SCCL";
  std::size_t max_chars = 64;  // text route length
  std::size_t max_sent = 16;   // sentiment route length
  std::size_t char_dim = 32;
  std::size_t word_dim = 32;
  double embed_init = 0.1;  // embedding rows start in U(-embed_init, embed_init)
  std::size_t gru_hidden = 64;
  bool gru_bias = false;
  bool use_bigru = true;
  TextHead text_head = TextHead::Capsule;
  capsule::CapsuleConfig caps;
  bool use_lexicon = true;
  sentiment::SentBranchConfig sent;
  FusionMode fusion = FusionMode::Average;
  double text_weight = 0.5;  // average fusion: p = w p_text + (1 - w) p_sent
  TrainConfig train;
  DataConfig data;
  std::uint64_t seed = 0;

  /// Throws ConfigError on non-positive extents or an indivisible capsule cut.
  void validate() const;
  /// Width of each row of the text feature map (2 * hidden with the BiGRU).
  std::size_t text_feature_width() const { return use_bigru ? 2 * gru_hidden : char_dim; }
  std::size_t text_feature_size() const;
};

/// JSON document mirroring ModelConfig; missing keys keep their defaults,
/// unknown keys are rejected.
ModelConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ModelConfig& cfg);
ModelConfig load_config(const std::filesystem::path& path);

/// Toy dimensions used by the gradient check (L=6, L_s=4, e=8, d=8, two
/// output capsules of width 4).
ModelConfig toy_config();

class ScclModel {
 public:
  struct Output {
    Tensor probs;       // fused 6-class distribution
    Tensor logits;      // set when probs = softmax(logits)
    Tensor text_probs;  // per-route distributions (average fusion)
    Tensor sent_probs;
  };

  ScclModel(ModelConfig cfg, Vocab chars, Vocab words, Lexicon lexicon);
  // Copies would alias the parameter tensors.
  ScclModel(const ScclModel&) = delete;
  ScclModel& operator=(const ScclModel&) = delete;
  ScclModel(ScclModel&&) = default;
  ScclModel& operator=(ScclModel&&) = default;

  /// Char vocab from the corpus, word vocab from the lexicon hits of its docs.
  static ScclModel build(const ModelConfig& cfg, const Corpus& train, Lexicon lexicon);

  Output forward(const LabeledDoc& doc) const;
  /// Cross-entropy of the fused prediction.
  Tensor loss(const LabeledDoc& doc) const;
  std::vector<double> distribution(const LabeledDoc& doc) const;
  int predict(const LabeledDoc& doc) const;

  const ModelConfig& config() const { return cfg_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const TableEmbedder& char_embedder() const { return chars_; }
  const TableEmbedder& word_embedder() const { return words_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  /// Binary checkpoint: parameters plus config, vocabularies and lexicon.
  void save(const std::filesystem::path& path) const;
  static ScclModel load(const std::filesystem::path& path);

 private:
  Tensor text_features(const LabeledDoc& doc) const;

  ModelConfig cfg_;
  Lexicon lexicon_;
  TableEmbedder chars_;
  TableEmbedder words_;
  gru::BiGruParams gru_;
  Tensor caps_W_;
  Tensor text_W_, text_b_;
  sentiment::SentBranchParams sent_;
  Tensor fusion_W_, fusion_b_;
  ParameterSet params_;
};

/// -ln(max(probs[label], 1e-12)); DataError for a label outside 0..5.
Tensor loss(const Tensor& probs, int label);

/// Finite-difference check of every trainable tensor of a model built from
/// `cfg` on a six-token toy document.
GradCheckResult gradcheck_model(const ModelConfig& cfg, double h = 1e-5);

}  // namespace sccl
