#include "sccl/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sccl/checkpoint.hpp"
#include "sccl/error.hpp"
#include "sccl/ops.hpp"
#include "sccl/random.hpp"

namespace sccl {

using nlohmann::json;

// ------------------------------------------------------------------ config

std::size_t ModelConfig::text_feature_size() const { return max_chars * text_feature_width(); }

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string("config: ") + name + " must be positive");
  };
  positive(max_chars, "max_chars");
  positive(max_sent, "max_sent");
  positive(char_dim, "char_dim");
  positive(word_dim, "word_dim");
  positive(gru_hidden, "gru_hidden");
  positive(caps.n_out, "caps.n_out");
  positive(caps.d_in, "caps.d_in");
  positive(caps.d_out, "caps.d_out");
  positive(caps.iters, "caps.iters");
  positive(sent.filters, "sent.filters");
  positive(train.batch_size, "train.batch_size");
  if (sent.kernel_widths.empty()) throw ConfigError("config: sent.kernel_widths is empty");
  for (auto w : sent.kernel_widths) {
    if (w == 0 || w > max_sent) {
      throw ConfigError("config: kernel width " + std::to_string(w) + " must lie in [1, max_sent=" +
                        std::to_string(max_sent) + "]");
    }
  }
  if (std::set<std::size_t>(sent.kernel_widths.begin(), sent.kernel_widths.end()).size() != sent.kernel_widths.size()) {
    throw ConfigError("config: duplicate kernel width");
  }
  if (text_head == TextHead::Capsule && text_feature_size() % caps.d_in != 0) {
    throw ConfigError("config: text feature map " + std::to_string(max_chars) + "x" +
                      std::to_string(text_feature_width()) + " cannot be cut into capsules of width " +
                      std::to_string(caps.d_in));
  }
  if (!(text_weight >= 0.0 && text_weight <= 1.0)) throw ConfigError("config: text_weight must lie in [0,1]");
  if (!(embed_init > 0.0)) throw ConfigError("config: embed_init must be positive");
  if (!(train.optimizer.lr >= 0.0)) throw ConfigError("config: learning rate must be non-negative");
  if (!(data.test_fraction > 0.0 && data.test_fraction < 1.0)) {
    throw ConfigError("config: data.test_fraction must lie in (0,1)");
  }
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("config: unknown key '" + where + key + "'");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

const char* fusion_name(FusionMode m) { return m == FusionMode::Average ? "average" : "concat"; }
const char* head_name(TextHead h) { return h == TextHead::Capsule ? "capsule" : "mean_pool"; }

}  // namespace

ModelConfig config_from_json(const std::string& json_text) {
  ModelConfig cfg;
  try {
    const json doc = json::parse(json_text);
    reject_unknown(doc,
                   {"variant", "max_chars", "max_sent", "char_dim", "word_dim", "embed_init", "gru_hidden", "gru_bias",
                    "use_bigru", "text_head", "caps", "use_lexicon", "sent", "fusion", "text_weight", "train", "data",
                    "seed"},
                   "");
    read(doc, "variant", cfg.variant);
    read(doc, "max_chars", cfg.max_chars);
    read(doc, "max_sent", cfg.max_sent);
    read(doc, "char_dim", cfg.char_dim);
    read(doc, "word_dim", cfg.word_dim);
    read(doc, "embed_init", cfg.embed_init);
    read(doc, "gru_hidden", cfg.gru_hidden);
    read(doc, "gru_bias", cfg.gru_bias);
    read(doc, "use_bigru", cfg.use_bigru);
    read(doc, "use_lexicon", cfg.use_lexicon);
    read(doc, "text_weight", cfg.text_weight);
    read(doc, "seed", cfg.seed);
    if (doc.contains("text_head")) {
      const auto h = doc.at("text_head").get<std::string>();
      if (h == "capsule") cfg.text_head = TextHead::Capsule;
      else if (h == "mean_pool") cfg.text_head = TextHead::MeanPool;
      else throw ConfigError("config: text_head must be capsule or mean_pool");
    }
    if (doc.contains("fusion")) {
      const auto f = doc.at("fusion").get<std::string>();
      if (f == "average") cfg.fusion = FusionMode::Average;
      else if (f == "concat") cfg.fusion = FusionMode::Concat;
      else throw ConfigError("config: fusion must be average or concat");
    }
    if (doc.contains("caps")) {
      const auto& c = doc.at("caps");
      reject_unknown(c, {"n_out", "d_in", "d_out", "iters", "share_weights"}, "caps.");
      read(c, "n_out", cfg.caps.n_out);
      read(c, "d_in", cfg.caps.d_in);
      read(c, "d_out", cfg.caps.d_out);
      read(c, "iters", cfg.caps.iters);
      read(c, "share_weights", cfg.caps.share_weights);
    }
    if (doc.contains("sent")) {
      const auto& s = doc.at("sent");
      reject_unknown(s, {"kernel_widths", "filters"}, "sent.");
      read(s, "kernel_widths", cfg.sent.kernel_widths);
      read(s, "filters", cfg.sent.filters);
    }
    if (doc.contains("train")) {
      const auto& t = doc.at("train");
      reject_unknown(t, {"epochs", "batch_size", "lr", "optimizer", "beta1", "beta2", "eps", "checkpoint_every"},
                     "train.");
      read(t, "epochs", cfg.train.epochs);
      read(t, "batch_size", cfg.train.batch_size);
      read(t, "lr", cfg.train.optimizer.lr);
      read(t, "beta1", cfg.train.optimizer.beta1);
      read(t, "beta2", cfg.train.optimizer.beta2);
      read(t, "eps", cfg.train.optimizer.eps);
      read(t, "checkpoint_every", cfg.train.checkpoint_every);
      if (t.contains("optimizer")) {
        const auto o = t.at("optimizer").get<std::string>();
        if (o == "adam") cfg.train.optimizer.kind = OptimizerKind::Adam;
        else if (o == "sgd") cfg.train.optimizer.kind = OptimizerKind::Sgd;
        else throw ConfigError("config: train.optimizer must be adam or sgd");
      }
    }
    if (doc.contains("data")) {
      const auto& d = doc.at("data");
      reject_unknown(d,
                     {"test_fraction", "stratified", "char_min_count", "word_min_count", "stats_min_count",
                      "stats_on_train_only"},
                     "data.");
      read(d, "test_fraction", cfg.data.test_fraction);
      read(d, "stratified", cfg.data.stratified);
      read(d, "char_min_count", cfg.data.char_min_count);
      read(d, "word_min_count", cfg.data.word_min_count);
      read(d, "stats_min_count", cfg.data.stats_min_count);
      read(d, "stats_on_train_only", cfg.data.stats_on_train_only);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ModelConfig& cfg) {
  json doc;
  doc["variant"] = cfg.variant;
  doc["max_chars"] = cfg.max_chars;
  doc["max_sent"] = cfg.max_sent;
  doc["char_dim"] = cfg.char_dim;
  doc["word_dim"] = cfg.word_dim;
  doc["embed_init"] = cfg.embed_init;
  doc["gru_hidden"] = cfg.gru_hidden;
  doc["gru_bias"] = cfg.gru_bias;
  doc["use_bigru"] = cfg.use_bigru;
  doc["text_head"] = head_name(cfg.text_head);
  doc["caps"] = {{"n_out", cfg.caps.n_out},
                 {"d_in", cfg.caps.d_in},
                 {"d_out", cfg.caps.d_out},
                 {"iters", cfg.caps.iters},
                 {"share_weights", cfg.caps.share_weights}};
  doc["use_lexicon"] = cfg.use_lexicon;
  doc["sent"] = {{"kernel_widths", cfg.sent.kernel_widths}, {"filters", cfg.sent.filters}};
  doc["fusion"] = fusion_name(cfg.fusion);
  doc["text_weight"] = cfg.text_weight;
  doc["train"] = {{"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size},
                  {"lr", cfg.train.optimizer.lr},
                  {"optimizer", cfg.train.optimizer.kind == OptimizerKind::Adam ? "adam" : "sgd"},
                  {"beta1", cfg.train.optimizer.beta1},
                  {"beta2", cfg.train.optimizer.beta2},
                  {"eps", cfg.train.optimizer.eps},
                  {"checkpoint_every", cfg.train.checkpoint_every}};
  doc["data"] = {{"test_fraction", cfg.data.test_fraction},
                 {"stratified", cfg.data.stratified},
                 {"char_min_count", cfg.data.char_min_count},
                 {"word_min_count", cfg.data.word_min_count},
                 {"stats_min_count", cfg.data.stats_min_count},
                 {"stats_on_train_only", cfg.data.stats_on_train_only}};
  doc["seed"] = cfg.seed;
  return doc.dump(2);
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

ModelConfig toy_config() {
  ModelConfig cfg;
  cfg.variant = "SCCL";
  cfg.max_chars = 6;
  cfg.max_sent = 4;
  cfg.char_dim = 8;
  cfg.word_dim = 8;
  // Wide embeddings keep activations O(1). With the default 0.1 the smallest
  // GRU gate gradients fall near 1e-9, where a central difference at h=1e-5
  // resolves only two or three digits.
  cfg.embed_init = 3.0;
  cfg.gru_hidden = 8;
  cfg.caps = {.n_out = 2, .d_in = 8, .d_out = 4, .iters = 3, .share_weights = false};
  cfg.sent = {.kernel_widths = {2, 3}, .filters = 4};
  return cfg;
}

// ------------------------------------------------------------------- model

namespace {

Tensor init_linear(std::size_t out, std::size_t in, std::uint64_t seed, const std::string& name) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Rng rng = derive_rng(seed, name);
  return Tensor::parameter({out, in}, uniform_values(out * in, -bound, bound, rng));
}

Tensor zero_bias(std::size_t n) { return Tensor::parameter({n}, std::vector<double>(n, 0.0)); }

}  // namespace

ScclModel::ScclModel(ModelConfig cfg, Vocab chars, Vocab words, Lexicon lexicon)
    : cfg_(std::move(cfg)),
      lexicon_(std::move(lexicon)),
      chars_(chars, make_embedding_table(chars.size(), cfg_.char_dim, cfg_.embed_init, cfg_.seed, "embed.char")),
      words_(words, make_embedding_table(words.size(), cfg_.word_dim, cfg_.embed_init, cfg_.seed, "embed.word")) {
  cfg_.validate();
  const std::uint64_t seed = cfg_.seed;
  params_.add("embed.char", chars_.table().weights, {Vocab::kPad});

  if (cfg_.use_bigru) {
    gru_ = gru::init_bidirectional(cfg_.gru_hidden, cfg_.char_dim, seed, cfg_.gru_bias);
    gru::register_params(params_, gru_);
  }

  std::size_t text_dim = cfg_.text_feature_width();
  if (cfg_.text_head == TextHead::Capsule) {
    caps_W_ = capsule::init_weights(cfg_.text_feature_size() / cfg_.caps.d_in, cfg_.caps, seed);
    params_.add("caps.W", caps_W_);
    text_dim = cfg_.caps.n_out * cfg_.caps.d_out;
  }

  const bool concat = cfg_.use_lexicon && cfg_.fusion == FusionMode::Concat;
  if (!concat) {
    text_W_ = init_linear(kNumClasses, text_dim, seed, "text.out.W");
    text_b_ = zero_bias(kNumClasses);
    params_.add("text.out.W", text_W_);
    params_.add("text.out.b", text_b_);
  }

  if (cfg_.use_lexicon) {
    params_.add("embed.word", words_.table().weights, {Vocab::kPad});
    sent_ = sentiment::init_params(cfg_.sent, cfg_.word_dim, concat ? 0 : kNumClasses, seed);
    sentiment::register_params(params_, sent_);
    if (concat) {
      const std::size_t fused = text_dim + sent_.feature_size();
      fusion_W_ = init_linear(kNumClasses, fused, seed, "fusion.W");
      fusion_b_ = zero_bias(kNumClasses);
      params_.add("fusion.W", fusion_W_);
      params_.add("fusion.b", fusion_b_);
    }
  }
}

ScclModel ScclModel::build(const ModelConfig& cfg, const Corpus& train, Lexicon lexicon) {
  cfg.validate();
  Vocab chars = build_vocab(train, VocabLevel::Char, cfg.data.char_min_count);
  std::vector<std::vector<std::string>> hits;
  hits.reserve(train.size());
  for (const auto& d : train.docs()) {
    auto seq = extract_sentiment_sequence(d, lexicon);
    if (!seq.is_null()) hits.push_back(std::move(seq.words));
  }
  Vocab words = build_vocab(hits, cfg.data.word_min_count);
  return ScclModel(cfg, std::move(chars), std::move(words), std::move(lexicon));
}

Tensor ScclModel::text_features(const LabeledDoc& doc) const {
  static const std::vector<std::string> kUnkOnly{std::string(Vocab::kUnkSymbol)};
  const auto& symbols = doc.chars.empty() ? kUnkOnly : doc.chars;
  Tensor H = chars_.embed(symbols, cfg_.max_chars);
  if (cfg_.use_bigru) H = gru::bidirectional(H, gru_);
  if (cfg_.text_head == TextHead::MeanPool) return mean(H, 0);
  const Tensor u = capsule::form_primary_capsules(H, cfg_.caps.d_in);
  const Tensor v = capsule::dynamic_routing(capsule::affine_predict(u, caps_W_), cfg_.caps.iters);
  return reshape(v, {v.size()});
}

ScclModel::Output ScclModel::forward(const LabeledDoc& doc) const {
  Output out;
  const Tensor text = text_features(doc);
  if (!cfg_.use_lexicon) {
    out.logits = add(matmul(text_W_, text), text_b_);
    out.probs = softmax(out.logits, 0);
    out.text_probs = out.probs;
    return out;
  }
  const auto seq = extract_sentiment_sequence(doc, lexicon_);
  const auto sent = sentiment::forward(seq, words_, cfg_.max_sent, sent_);
  if (cfg_.fusion == FusionMode::Concat) {
    out.logits = add(matmul(fusion_W_, concat({text, sent.features}, 0)), fusion_b_);
    out.probs = softmax(out.logits, 0);
    return out;
  }
  out.text_probs = softmax(add(matmul(text_W_, text), text_b_), 0);
  out.sent_probs = sent.probs;
  out.probs = add(scale(out.text_probs, cfg_.text_weight), scale(out.sent_probs, 1.0 - cfg_.text_weight));
  return out;
}

Tensor loss(const Tensor& probs, int label) {
  if (label < 0 || label >= static_cast<int>(kNumClasses)) {
    throw DataError("loss: label " + std::to_string(label) + " out of range");
  }
  return nll(probs, static_cast<std::size_t>(label), 1e-12);
}

Tensor ScclModel::loss(const LabeledDoc& doc) const {
  const auto out = forward(doc);
  if (out.logits.defined()) {
    if (doc.label < 0 || doc.label >= static_cast<int>(kNumClasses)) {
      throw DataError("loss: label " + std::to_string(doc.label) + " out of range");
    }
    return softmax_cross_entropy(out.logits, static_cast<std::size_t>(doc.label));
  }
  return sccl::loss(out.probs, doc.label);
}

std::vector<double> ScclModel::distribution(const LabeledDoc& doc) const { return forward(doc).probs.to_vector(); }

int ScclModel::predict(const LabeledDoc& doc) const {
  const auto p = distribution(doc);
  // max_element keeps the first maximum: ties go to the lowest class id.
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

// -------------------------------------------------------------- persistence

namespace {

constexpr const char* kBundleFormat = "sccl-model";
constexpr int kBundleVersion = 1;

}  // namespace

void ScclModel::save(const std::filesystem::path& path) const {
  json meta;
  meta["format"] = kBundleFormat;
  meta["version"] = kBundleVersion;
  meta["config"] = json::parse(config_to_json(cfg_));
  meta["char_vocab"] = chars_.vocab().regular_symbols();
  meta["word_vocab"] = words_.vocab().regular_symbols();
  json lex = json::array();
  for (const auto& [word, e] : lexicon_.entries()) {
    lex.push_back({word, static_cast<int>(e.polarity), e.score, e.source == EntrySource::Base ? "base" : "expanded"});
  }
  meta["lexicon"] = std::move(lex);
  save_checkpoint(path, snapshot(params_, meta.dump()));
}

ScclModel ScclModel::load(const std::filesystem::path& path) {
  const Checkpoint ckpt = load_checkpoint(path);
  try {
    const json meta = json::parse(ckpt.metadata);
    if (meta.at("format") != kBundleFormat || meta.at("version") != kBundleVersion) {
      throw DataError("checkpoint " + path.string() + " is not a model bundle");
    }
    ModelConfig cfg = config_from_json(meta.at("config").dump());
    Vocab chars = Vocab::from_symbols(meta.at("char_vocab").get<std::vector<std::string>>());
    Vocab words = Vocab::from_symbols(meta.at("word_vocab").get<std::vector<std::string>>());
    Lexicon lexicon;
    for (const auto& row : meta.at("lexicon")) {
      LexiconEntry e;
      e.polarity = row.at(1).get<int>() > 0 ? Polarity::Positive : Polarity::Negative;
      e.score = row.at(2).get<double>();
      e.source = row.at(3).get<std::string>() == "base" ? EntrySource::Base : EntrySource::Expanded;
      lexicon.add(row.at(0).get<std::string>(), e);
    }
    ScclModel model(std::move(cfg), std::move(chars), std::move(words), std::move(lexicon));
    restore(ckpt, model.params_);
    return model;
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": bad metadata: " + e.what());
  }
}

// --------------------------------------------------------------- gradcheck

GradCheckResult gradcheck_model(const ModelConfig& cfg, double h) {
  Lexicon lex;
  lex.add("美", {Polarity::Positive, 0.0, EntrySource::Base});
  lex.add("糟糕", {Polarity::Negative, 0.0, EntrySource::Base});
  lex.add("开心", {Polarity::Positive, 1.5, EntrySource::Expanded});
  const LabeledDoc doc = make_doc({"风景", "很", "美", "但", "糟糕", "开心"}, 2);
  ScclModel model = ScclModel::build(cfg, Corpus({doc}), std::move(lex));
  return finite_difference_check([&] { return model.loss(doc); }, model.params(), h);
}

}  // namespace sccl
