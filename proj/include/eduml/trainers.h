#ifndef EDUML_TRAINERS_H_
#define EDUML_TRAINERS_H_

#include <cstdint>
#include <vector>

#include "eduml/dataset.h"
#include "eduml/train_params.h"
#include "eduml/tree.h"

namespace eduml {

// 1 - sum of squared class proportions. Throws EmptyNode when both are zero.
double gini_impurity(double fail_count, double pass_count);

// Greedy CART tree. Candidate thresholds are midpoints between consecutive
// distinct values; each split maximizes Gini gain with missing values sent
// to the better side. Ties keep the lowest feature index, then the smallest
// threshold, then default-left.
TreeEnsemble fit_tree(const LabeledDataset& data, const TrainParams& params,
                      uint64_t seed);

// Bagged CART trees with per-split feature subsampling. Tree i uses seed
// derive_seed(seed, "forest-tree", i), so any training order gives the same
// forest. `reverse_order` trains the trees last-to-first.
TreeEnsemble fit_forest(const LabeledDataset& data, const TrainParams& params,
                        uint64_t seed, bool reverse_order = false);

struct BoostTrace {
  std::vector<double> train_logloss;  // after each round; entry 0 is the base
};

// Second-order gradient boosting with logistic loss on the pass outcome.
TreeEnsemble fit_gbm(const LabeledDataset& data, const TrainParams& params,
                     uint64_t seed, BoostTrace* trace = nullptr);

// Mean logistic loss of pass probabilities against the labels.
double log_loss(const std::vector<uint8_t>& labels, const std::vector<double>& p_pass);

}  // namespace eduml

#endif  // EDUML_TRAINERS_H_
