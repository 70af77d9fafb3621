#include "sccl/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "sccl/error.hpp"

namespace sccl {

namespace {

std::size_t checked_label(int label, const char* which) {
  if (label < 0 || label >= static_cast<int>(kNumClasses)) {
    throw DataError(std::string("metrics: ") + which + " label " + std::to_string(label) + " out of range");
  }
  return static_cast<std::size_t>(label);
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw DataError("metrics: truth and prediction counts differ");
  if (truth.empty()) throw DataError("metrics: no documents to evaluate");
  Metrics m;
  m.total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m.confusion[checked_label(truth[i], "true")][checked_label(predicted[i], "predicted")];
  }
  std::size_t correct = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::size_t col = 0;
    for (std::size_t t = 0; t < kNumClasses; ++t) {
      m.support[c] += m.confusion[c][t];
      col += m.confusion[t][c];
    }
    const std::size_t tp = m.confusion[c][c];
    correct += tp;
    m.precision[c] = ratio(tp, col);
    m.recall[c] = ratio(tp, m.support[c]);
    // F1 = 2 tp / (2 tp + fp + fn) is exact and avoids the 0/0 case of 2PR/(P+R).
    m.f1[c] = ratio(2 * tp, m.support[c] + col);
    if (m.support[c] == 0) m.zero_support.push_back(static_cast<int>(c));
    f1_sum += m.f1[c];
  }
  m.accuracy = ratio(correct, m.total);
  m.macro_f1 = f1_sum / static_cast<double>(kNumClasses);
  m.micro_f1 = m.accuracy;
  return m;
}

int argmax(const std::vector<double>& probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

void write_metrics_header(std::ostream& out) { out << "variant\tacc\tf1\n"; }

void write_metrics_row(std::ostream& out, const std::string& variant, const Metrics& m) {
  out << variant << '\t' << percent(m.accuracy) << '\t' << percent(m.macro_f1) << '\n';
}

void write_metrics_detail(std::ostream& out, const Metrics& m) {
  out << "micro_f1\t" << percent(m.micro_f1) << '\n';
  out << "class\tname\tsupport\tprecision\trecall\tf1\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out << c << '\t' << emotion_name(static_cast<int>(c)) << '\t' << m.support[c] << '\t' << percent(m.precision[c])
        << '\t' << percent(m.recall[c]) << '\t' << percent(m.f1[c]);
    if (m.support[c] == 0) out << "\tzero-support";
    out << '\n';
  }
  out << "confusion (rows = truth, columns = prediction)\n";
  for (const auto& row : m.confusion) {
    for (std::size_t c = 0; c < kNumClasses; ++c) out << (c ? "\t" : "") << row[c];
    out << '\n';
  }
}

}  // namespace sccl
