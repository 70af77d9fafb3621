#include "sccl/train.hpp"

#include <cmath>
#include <numeric>

#include "sccl/error.hpp"
#include "sccl/random.hpp"
#include "sccl/text.hpp"

namespace sccl {

namespace {

std::filesystem::path epoch_path(const std::filesystem::path& base, std::size_t epoch) {
  auto name = base.stem().string() + ".epoch" + std::to_string(epoch) + base.extension().string();
  return base.parent_path() / name;
}

}  // namespace

std::vector<EpochRecord> train(ScclModel& model, const Corpus& data, const TrainOptions& opts) {
  if (data.empty()) throw DataError("train: corpus is empty");
  const auto& tc = model.config().train;
  auto optimizer = make_optimizer(tc.optimizer);
  Rng rng = derive_rng(model.config().seed, "shuffle");
  std::vector<std::size_t> order(data.size());
  std::vector<EpochRecord> history;

  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t stop = std::min(order.size(), start + tc.batch_size);
      model.params().zero_grad();
      for (std::size_t k = start; k < stop; ++k) {
        const LabeledDoc& doc = data[order[k]];
        const Tensor l = model.loss(doc);
        const double v = l.item();
        if (!std::isfinite(v)) {
          throw DivergenceError("train: loss became " + text::format_double(v) + " at epoch " +
                                std::to_string(epoch) + ", document " + std::to_string(order[k]));
        }
        loss_sum += v;
        backward(l);
      }
      model.params().scale_grad(1.0 / static_cast<double>(stop - start));
      optimizer->step(model.params());
    }
    // Accuracy is measured after the epoch's updates so the last record
    // describes the returned parameters.
    for (const auto& doc : data.docs()) correct += model.predict(doc) == doc.label ? 1 : 0;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = loss_sum / static_cast<double>(data.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    if (opts.validation != nullptr && !opts.validation->empty()) rec.validation = evaluate(model, *opts.validation);
    history.push_back(rec);
    if (opts.on_epoch) opts.on_epoch(rec);
    if (opts.checkpoint && tc.checkpoint_every != 0 && epoch % tc.checkpoint_every == 0 && epoch != tc.epochs) {
      model.save(epoch_path(*opts.checkpoint, epoch));
    }
  }
  if (opts.checkpoint) model.save(*opts.checkpoint);
  return history;
}

Metrics evaluate(const ScclModel& model, const Corpus& data) {
  if (data.empty()) throw DataError("evaluate: corpus is empty");
  std::vector<int> truth, pred;
  truth.reserve(data.size());
  pred.reserve(data.size());
  for (const auto& doc : data.docs()) {
    truth.push_back(doc.label);
    pred.push_back(model.predict(doc));
  }
  return compute_metrics(truth, pred);
}

void write_history(std::ostream& out, const std::vector<EpochRecord>& history) {
  const bool with_val = !history.empty() && history.front().validation.has_value();
  out << "epoch\tloss\ttrain_acc" << (with_val ? "\tval_acc\tval_f1" : "") << '\n';
  for (const auto& r : history) {
    out << r.epoch << '\t' << text::format_double(r.mean_loss) << '\t' << percent(r.train_accuracy);
    if (with_val && r.validation) out << '\t' << percent(r.validation->accuracy) << '\t' << percent(r.validation->macro_f1);
    out << '\n';
  }
}

}  // namespace sccl
