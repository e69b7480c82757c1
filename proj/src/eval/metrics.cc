#include "eduml/metrics.h"

#include <cmath>
#include <vector>

#include "eduml/association.h"
#include "eduml/dataset.h"
#include "eduml/error.h"

namespace eduml {
namespace {

void check_aligned(size_t a, size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kInvalidParameter,
                "labels and scores differ in length (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  }
}

}  // namespace

ConfusionMetrics confusion_metrics(std::span<const uint8_t> labels,
                                   std::span<const double> p_fail, double threshold) {
  check_aligned(labels.size(), p_fail.size());
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "no rows to score");
  ConfusionMetrics m;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (!(p_fail[i] >= 0.0 && p_fail[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidParameter, "probabilities must lie in [0, 1]");
    }
    const bool predicted_fail = p_fail[i] >= threshold;
    if (labels[i] == kFail) {
      ++(predicted_fail ? m.true_positive : m.false_negative);
    } else {
      ++(predicted_fail ? m.false_positive : m.true_negative);
    }
  }
  const double n_fail = static_cast<double>(m.true_positive + m.false_negative);
  const double n_pass = static_cast<double>(m.true_negative + m.false_positive);
  m.accuracy = static_cast<double>(m.true_positive + m.true_negative) /
               static_cast<double>(labels.size());
  m.sensitivity = n_fail > 0 ? static_cast<double>(m.true_positive) / n_fail : std::nan("");
  m.specificity = n_pass > 0 ? static_cast<double>(m.true_negative) / n_pass : std::nan("");
  return m;
}

double roc_auc(std::span<const uint8_t> labels, std::span<const double> scores) {
  check_aligned(labels.size(), scores.size());
  const std::vector<double> ranks = mid_ranks(std::vector<double>(scores.begin(), scores.end()));
  double rank_sum = 0.0;
  double n_pos = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kFail) {
      rank_sum += ranks[i];
      n_pos += 1.0;
    }
  }
  const double n_neg = static_cast<double>(labels.size()) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw Error(ErrorCode::kSingleClass, "AUC needs both fail and pass rows");
  }
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace eduml
