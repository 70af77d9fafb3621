#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "sccl/corpus.hpp"
#include "sccl/metrics.hpp"
#include "sccl/model.hpp"

namespace sccl {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<Metrics> validation;
};

struct TrainOptions {
  const Corpus* validation = nullptr;
  /// Written every cfg.train.checkpoint_every epochs as `<stem>.epoch<k><ext>`,
  /// and unconditionally after the last epoch as the path itself.
  std::optional<std::filesystem::path> checkpoint;
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Mini-batch training with the configured optimizer. Each epoch visits the
/// corpus in an order drawn from the "shuffle" stream of cfg.seed; a batch
/// averages the per-document gradients. Throws DivergenceError when a loss
/// is not finite.
std::vector<EpochRecord> train(ScclModel& model, const Corpus& data, const TrainOptions& opts = {});

/// Argmax predictions of every doc; DataError on an empty corpus.
Metrics evaluate(const ScclModel& model, const Corpus& data);

/// `epoch\tloss\ttrain_acc[\tval_acc\tval_f1]` with a header row.
void write_history(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace sccl
