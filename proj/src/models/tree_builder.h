#ifndef EDUML_MODELS_TREE_BUILDER_H_
#define EDUML_MODELS_TREE_BUILDER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "eduml/dataset.h"
#include "eduml/tree.h"

namespace eduml::internal {

// Per-feature row order by value, computed once and shared by every tree
// grown on the same rows.
struct Presorted {
  std::vector<std::vector<double>> values;    // ascending, non-missing only
  std::vector<std::vector<uint32_t>> rows;    // row of each value
  std::vector<std::vector<uint32_t>> missing; // rows with a missing value

  static Presorted build(const LabeledDataset& data);
};

enum class SplitCriterion { kGini, kNewton };

struct GrowConfig {
  SplitCriterion criterion = SplitCriterion::kGini;
  int max_depth = 6;
  // Gini: minimum weighted rows per child. Newton: minimum hessian per child.
  double min_child = 1.0;
  double min_gain = 0.0;
  double lambda = 1.0;
  double gamma = 0.0;
  int features_per_node = 0;  // 0 = all features
  uint64_t seed = 0;
};

// Grows one tree level by level with an exact scan over presorted values.
// `weights` gives each row's multiplicity (0 excludes it). For kNewton,
// `grad` and `hess` hold the per-row first and second derivatives.
Tree grow_tree(const LabeledDataset& data, const Presorted& presorted,
               std::span<const double> weights, std::span<const double> grad,
               std::span<const double> hess, const GrowConfig& config);

}  // namespace eduml::internal

#endif  // EDUML_MODELS_TREE_BUILDER_H_
