#ifndef EDUML_TREE_H_
#define EDUML_TREE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eduml {

// Node of a binary decision tree stored in a flat array; children are
// indices into the same array. Rows go left when value < threshold; missing
// values follow default_left.
struct TreeNode {
  int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool default_left = true;
  int32_t left = -1;
  int32_t right = -1;
  // Leaf output: pass vote in {0, 1} for single/bagged trees, raw weight for
  // boosted trees. Internal nodes carry the value they would have as leaves.
  double value = 0.0;
  double gini = 0.0;
  double gain = 0.0;       // split gain; 0 for leaves
  double n_samples = 0.0;  // training rows reaching the node (bootstrap-weighted)
  double n_fail = 0.0;
  double n_pass = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0

  size_t leaf_index(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return nodes[leaf_index(row)].value; }
  int depth() const;
  size_t n_leaves() const;
  bool operator==(const Tree&) const = default;
};

enum class EnsembleMode { kSingle, kBagged, kBoosted };

const char* ensemble_mode_name(EnsembleMode mode);
EnsembleMode parse_ensemble_mode(const std::string& name);

// Fitted tree model. Probabilities are for the pass outcome:
//   single/bagged: mean of per-tree pass votes;
//   boosted: sigmoid(base_score + learning_rate * sum of tree outputs).
struct TreeEnsemble {
  EnsembleMode mode = EnsembleMode::kSingle;
  std::vector<Tree> trees;
  double base_score = 0.0;
  double learning_rate = 1.0;
  std::vector<uint64_t> tree_seeds;
  std::vector<std::string> feature_names;

  // Raw margin: mean vote (single/bagged) or log-odds (boosted).
  double margin(std::span<const double> row) const;
  double predict_proba(std::span<const double> row) const;
  // Per-tree multiplier applied to leaf values in the margin.
  double tree_scale() const;

  bool operator==(const TreeEnsemble&) const = default;
};

double sigmoid(double x);

}  // namespace eduml

#endif  // EDUML_TREE_H_
