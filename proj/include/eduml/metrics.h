#ifndef EDUML_METRICS_H_
#define EDUML_METRICS_H_

#include <cstdint>
#include <span>

namespace eduml {

// Fail is the positive class. Rates for an absent class are NaN.
struct ConfusionMetrics {
  double accuracy = 0.0;
  double sensitivity = 0.0;  // TP / (TP + FN) over fail rows
  double specificity = 0.0;  // TN / (TN + FP) over pass rows
  size_t true_positive = 0;
  size_t false_negative = 0;
  size_t true_negative = 0;
  size_t false_positive = 0;
};

// Predicts fail iff p_fail >= threshold. Throws EmptyInput.
ConfusionMetrics confusion_metrics(std::span<const uint8_t> labels,
                                   std::span<const double> p_fail, double threshold = 0.5);

// Mann-Whitney AUC with mid-ranks: the probability that a fail row scores
// above a pass row, ties counting half. Throws SingleClass.
double roc_auc(std::span<const uint8_t> labels, std::span<const double> scores);

}  // namespace eduml

#endif  // EDUML_METRICS_H_
