#include "sccl/ablation.hpp"

#include <algorithm>

#include "sccl/error.hpp"
#include "sccl/train.hpp"

namespace sccl {

namespace {

struct VariantSpec {
  const char* name;
  bool bigru;
  TextHead head;
  bool lexicon;
  bool expanded;
};

constexpr VariantSpec kSpecs[] = {
    {"BERT", false, TextHead::MeanPool, false, false},
    {"BERT-BiGRU", true, TextHead::MeanPool, false, false},
    {"BERT-CapsuleNet", false, TextHead::Capsule, false, false},
    {"BERT-BiGRU-CapsuleNet", true, TextHead::Capsule, false, false},
    {"BERT-BiGRU-Normal Lexicon", true, TextHead::MeanPool, true, false},
    {"BERT-BiGRU-Expanded Lexicon", true, TextHead::MeanPool, true, true},
    {"SCCL", true, TextHead::Capsule, true, true},
};

const VariantSpec& spec(const std::string& name) {
  for (const auto& s : kSpecs) {
    if (name == s.name) return s;
  }
  std::string known;
  for (const auto& s : kSpecs) known += std::string(known.empty() ? "" : ", ") + s.name;
  throw ConfigError("unknown variant '" + name + "' (known: " + known + ")");
}

}  // namespace

const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : kSpecs) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

ModelConfig variant_config(const ModelConfig& base, const std::string& name) {
  const auto& s = spec(name);
  ModelConfig cfg = base;
  cfg.variant = name;
  cfg.use_bigru = s.bigru;
  cfg.text_head = s.head;
  cfg.use_lexicon = s.lexicon;
  cfg.validate();
  return cfg;
}

bool variant_uses_expanded_lexicon(const std::string& name) { return spec(name).expanded; }

ExpansionResult build_expanded_lexicon(const Corpus& text, const LexiconPlan& plan, std::size_t stats_min_count) {
  const CorpusStats stats = CorpusStats::build(text, stats_min_count);
  const SeedSet seeds = plan.seeds ? *plan.seeds : auto_seeds(stats, plan.base, plan.auto_seed_count);
  seeds.validate();
  return expand_lexicon(plan.base, seeds, stats, plan.n_pos, plan.n_neg);
}

std::vector<AblationRow> run_ablation(const ModelConfig& cfg, const std::vector<std::string>& variants,
                                      const Corpus& corpus, const LexiconPlan& plan, const Corpus* target) {
  if (variants.empty()) throw ConfigError("ablate: empty variant list");
  for (const auto& v : variants) spec(v);
  cfg.validate();

  const auto [train_set, test_set] =
      split_train_test(corpus, {.test_fraction = cfg.data.test_fraction, .seed = cfg.seed, .stratified = cfg.data.stratified});

  std::optional<Lexicon> expanded;
  if (std::any_of(variants.begin(), variants.end(), variant_uses_expanded_lexicon)) {
    expanded = build_expanded_lexicon(cfg.data.stats_on_train_only ? train_set : corpus, plan, cfg.data.stats_min_count)
                   .lexicon;
  }

  std::vector<AblationRow> rows;
  for (const auto& name : variants) {
    const ModelConfig vcfg = variant_config(cfg, name);
    Lexicon lex = !vcfg.use_lexicon ? Lexicon{} : variant_uses_expanded_lexicon(name) ? *expanded : plan.base;
    ScclModel model = ScclModel::build(vcfg, train_set, std::move(lex));
    train(model, train_set);
    rows.push_back({name, evaluate(model, test_set)});
    if (target != nullptr && name == "SCCL") rows.push_back({name + kTargetRowSuffix, evaluate(model, *target)});
  }
  return rows;
}

void write_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows) {
  write_metrics_header(out);
  for (const auto& r : rows) write_metrics_row(out, r.variant, r.metrics);
}

}  // namespace sccl
