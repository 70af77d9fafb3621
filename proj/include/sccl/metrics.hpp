#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "sccl/corpus.hpp"

namespace sccl {

using ConfusionMatrix = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;  // [truth][pred]

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;  // unweighted mean over all six classes
  double micro_f1 = 0.0;  // equals accuracy for single-label data
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  std::array<std::size_t, kNumClasses> support{};
  std::vector<int> zero_support;  // classes absent from the truth labels (their F1 counts as 0)
  ConfusionMatrix confusion{};
  std::size_t total = 0;

  bool operator==(const Metrics&) const = default;
};

/// Throws DataError when the lists differ in length, are empty, or hold a
/// label outside 0..5.
Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Index of the largest entry; ties go to the lowest index.
int argmax(const std::vector<double>& probs);

/// Two-decimal percentage, e.g. 0.5245 -> "52.45".
std::string percent(double fraction);

/// `variant\tacc\tf1` header.
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const std::string& variant, const Metrics& m);

/// Per-class precision/recall/F1, micro-F1 and the confusion matrix.
void write_metrics_detail(std::ostream& out, const Metrics& m);

}  // namespace sccl
