#include "eduml/tree.h"

#include <algorithm>
#include <cmath>

#include "eduml/error.h"

namespace eduml {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

size_t Tree::leaf_index(std::span<const double> row) const {
  size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    const double v = row[n.feature];
    const bool go_left = std::isnan(v) ? n.default_left : v < n.threshold;
    i = static_cast<size_t>(go_left ? n.left : n.right);
  }
  return i;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int out = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    out = std::max(out, d[i]);
    if (!nodes[i].is_leaf()) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
  }
  return out;
}

size_t Tree::n_leaves() const {
  return static_cast<size_t>(std::count_if(nodes.begin(), nodes.end(),
                                           [](const TreeNode& n) { return n.is_leaf(); }));
}

const char* ensemble_mode_name(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::kSingle: return "single";
    case EnsembleMode::kBagged: return "bagged";
    case EnsembleMode::kBoosted: return "boosted";
  }
  return "?";
}

EnsembleMode parse_ensemble_mode(const std::string& name) {
  if (name == "single") return EnsembleMode::kSingle;
  if (name == "bagged") return EnsembleMode::kBagged;
  if (name == "boosted") return EnsembleMode::kBoosted;
  throw Error(ErrorCode::kInvalidConfig, "unknown ensemble mode '" + name + "'");
}

double TreeEnsemble::tree_scale() const {
  if (mode == EnsembleMode::kBoosted) return learning_rate;
  return trees.empty() ? 0.0 : 1.0 / static_cast<double>(trees.size());
}

double TreeEnsemble::margin(std::span<const double> row) const {
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.predict(row);
  if (mode == EnsembleMode::kBoosted) return base_score + learning_rate * sum;
  return sum / static_cast<double>(trees.size());
}

double TreeEnsemble::predict_proba(std::span<const double> row) const {
  const double m = margin(row);
  return mode == EnsembleMode::kBoosted ? sigmoid(m) : m;
}

}  // namespace eduml
