#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sccl/corpus.hpp"
#include "sccl/lexicon.hpp"
#include "sccl/metrics.hpp"
#include "sccl/model.hpp"

namespace sccl {

/// Row labels of the ablation table, in table order.
const std::vector<std::string>& ablation_variants();
inline constexpr const char* kTargetRowSuffix = "-test";

/// `base` with the route switches of the named variant; ConfigError for an
/// unknown name. Returns whether the variant reads the expanded lexicon.
ModelConfig variant_config(const ModelConfig& base, const std::string& name);
bool variant_uses_expanded_lexicon(const std::string& name);

struct LexiconPlan {
  Lexicon base;
  std::optional<SeedSet> seeds;  // auto-selected from the training split when absent
  std::size_t auto_seed_count = 20;
  std::size_t n_pos = 60;
  std::size_t n_neg = 60;
};

/// Builds the expanded lexicon from the statistics of `text`.
ExpansionResult build_expanded_lexicon(const Corpus& text, const LexiconPlan& plan, std::size_t stats_min_count);

struct AblationRow {
  std::string variant;
  Metrics metrics;
};

/// Splits `corpus` once with cfg.data and cfg.seed, expands the lexicon once,
/// then trains and evaluates every variant on that split. With a target
/// corpus the full SCCL model is also scored on it as an extra "SCCL-test" row.
std::vector<AblationRow> run_ablation(const ModelConfig& cfg, const std::vector<std::string>& variants,
                                      const Corpus& corpus, const LexiconPlan& plan,
                                      const Corpus* target = nullptr);

void write_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows);

}  // namespace sccl
