#include "eduml/trainers.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "eduml/error.h"
#include "eduml/rng.h"
#include "tree_builder.h"

namespace eduml {
namespace {

using internal::GrowConfig;
using internal::Presorted;
using internal::SplitCriterion;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidParameter, what);
}

struct ParamField {
  double (*get)(const TrainParams&);
  void (*set)(TrainParams&, double);
};

const std::map<std::string, ParamField>& param_fields() {
  static const std::map<std::string, ParamField> fields = {
      {"tree.max_depth", {[](const TrainParams& p) { return double(p.tree.max_depth); },
                          [](TrainParams& p, double v) { p.tree.max_depth = int(v); }}},
      {"tree.min_samples_leaf",
       {[](const TrainParams& p) { return double(p.tree.min_samples_leaf); },
        [](TrainParams& p, double v) { p.tree.min_samples_leaf = int(v); }}},
      {"tree.min_gain", {[](const TrainParams& p) { return p.tree.min_gain; },
                         [](TrainParams& p, double v) { p.tree.min_gain = v; }}},
      {"forest.n_trees", {[](const TrainParams& p) { return double(p.forest.n_trees); },
                          [](TrainParams& p, double v) { p.forest.n_trees = int(v); }}},
      {"forest.bootstrap",
       {[](const TrainParams& p) { return p.forest.bootstrap ? 1.0 : 0.0; },
        [](TrainParams& p, double v) { p.forest.bootstrap = v != 0.0; }}},
      {"forest.feature_fraction",
       {[](const TrainParams& p) { return p.forest.feature_fraction; },
        [](TrainParams& p, double v) { p.forest.feature_fraction = v; }}},
      {"boost.n_rounds", {[](const TrainParams& p) { return double(p.boost.n_rounds); },
                          [](TrainParams& p, double v) { p.boost.n_rounds = int(v); }}},
      {"boost.learning_rate",
       {[](const TrainParams& p) { return p.boost.learning_rate; },
        [](TrainParams& p, double v) { p.boost.learning_rate = v; }}},
      {"boost.lambda", {[](const TrainParams& p) { return p.boost.lambda; },
                        [](TrainParams& p, double v) { p.boost.lambda = v; }}},
      {"boost.gamma", {[](const TrainParams& p) { return p.boost.gamma; },
                       [](TrainParams& p, double v) { p.boost.gamma = v; }}},
      {"boost.max_depth", {[](const TrainParams& p) { return double(p.boost.max_depth); },
                           [](TrainParams& p, double v) { p.boost.max_depth = int(v); }}},
      {"boost.min_child_weight",
       {[](const TrainParams& p) { return p.boost.min_child_weight; },
        [](TrainParams& p, double v) { p.boost.min_child_weight = v; }}},
      {"linear.lambda", {[](const TrainParams& p) { return p.linear.lambda; },
                         [](TrainParams& p, double v) { p.linear.lambda = v; }}},
      {"linear.tolerance", {[](const TrainParams& p) { return p.linear.tolerance; },
                            [](TrainParams& p, double v) { p.linear.tolerance = v; }}},
      {"linear.max_iterations",
       {[](const TrainParams& p) { return double(p.linear.max_iterations); },
        [](TrainParams& p, double v) { p.linear.max_iterations = int(v); }}},
  };
  return fields;
}

std::vector<double> ones(size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

void TrainParams::validate() const {
  require(tree.max_depth >= 0 && tree.max_depth <= 64, "tree.max_depth must be in [0, 64]");
  require(tree.min_samples_leaf >= 1, "tree.min_samples_leaf must be >= 1");
  require(tree.min_gain >= 0.0, "tree.min_gain must be >= 0");
  require(forest.n_trees >= 1, "forest.n_trees must be >= 1");
  require(forest.feature_fraction <= 1.0, "forest.feature_fraction must be <= 1");
  require(boost.n_rounds >= 1, "boost.n_rounds must be >= 1");
  require(boost.learning_rate >= 0.0, "boost.learning_rate must be >= 0");
  require(boost.lambda >= 0.0, "boost.lambda must be >= 0");
  require(boost.gamma >= 0.0, "boost.gamma must be >= 0");
  require(boost.max_depth >= 0 && boost.max_depth <= 64,
          "boost.max_depth must be in [0, 64]");
  require(boost.min_child_weight >= 0.0, "boost.min_child_weight must be >= 0");
  require(linear.lambda >= 0.0, "linear.lambda must be >= 0");
  require(linear.tolerance > 0.0, "linear.tolerance must be > 0");
  require(linear.max_iterations >= 1, "linear.max_iterations must be >= 1");
}

void TrainParams::set(const std::string& name, double value) {
  auto it = param_fields().find(name);
  if (it == param_fields().end()) {
    throw Error(ErrorCode::kInvalidConfig, "unknown parameter '" + name + "'");
  }
  it->second.set(*this, value);
}

double TrainParams::get(const std::string& name) const {
  auto it = param_fields().find(name);
  if (it == param_fields().end()) {
    throw Error(ErrorCode::kInvalidConfig, "unknown parameter '" + name + "'");
  }
  return it->second.get(*this);
}

const std::vector<std::string>& TrainParams::parameter_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, field] : param_fields()) out.push_back(name);
    return out;
  }();
  return names;
}

double gini_impurity(double fail_count, double pass_count) {
  if (fail_count < 0.0 || pass_count < 0.0) {
    throw Error(ErrorCode::kInvalidParameter, "class counts must be non-negative");
  }
  const double total = fail_count + pass_count;
  if (total <= 0.0) throw Error(ErrorCode::kEmptyNode, "node has no samples");
  const double pf = fail_count / total;
  const double pp = pass_count / total;
  return 1.0 - (pf * pf + pp * pp);
}

TreeEnsemble fit_tree(const LabeledDataset& data, const TrainParams& params,
                      uint64_t seed) {
  params.validate();
  data.require_both_classes();
  const Presorted presorted = Presorted::build(data);
  GrowConfig config;
  config.criterion = SplitCriterion::kGini;
  config.max_depth = params.tree.max_depth;
  config.min_child = params.tree.min_samples_leaf;
  config.min_gain = params.tree.min_gain;
  config.seed = seed;
  const std::vector<double> weights = ones(data.n_rows);

  TreeEnsemble model;
  model.mode = EnsembleMode::kSingle;
  model.feature_names = data.feature_names;
  model.tree_seeds = {seed};
  model.trees.push_back(internal::grow_tree(data, presorted, weights, {}, {}, config));
  return model;
}

TreeEnsemble fit_forest(const LabeledDataset& data, const TrainParams& params,
                        uint64_t seed, bool reverse_order) {
  params.validate();
  data.require_both_classes();
  const Presorted presorted = Presorted::build(data);
  const size_t n_features = data.n_features;
  int per_node;
  if (params.forest.feature_fraction <= 0.0) {
    per_node = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features))));
  } else {
    per_node = static_cast<int>(
        std::floor(params.forest.feature_fraction * static_cast<double>(n_features)));
  }
  per_node = std::clamp(per_node, 1, static_cast<int>(n_features));

  const size_t n_trees = static_cast<size_t>(params.forest.n_trees);
  TreeEnsemble model;
  model.mode = EnsembleMode::kBagged;
  model.feature_names = data.feature_names;
  model.trees.resize(n_trees);
  model.tree_seeds.resize(n_trees);

  for (size_t k = 0; k < n_trees; ++k) {
    const size_t i = reverse_order ? n_trees - 1 - k : k;
    const uint64_t tree_seed = derive_seed(seed, "forest-tree", i);
    std::vector<double> weights;
    if (params.forest.bootstrap) {
      weights.assign(data.n_rows, 0.0);
      Rng rng(derive_seed(tree_seed, "bootstrap"));
      for (size_t d = 0; d < data.n_rows; ++d) weights[rng.uniform_index(data.n_rows)] += 1.0;
    } else {
      weights = ones(data.n_rows);
    }
    GrowConfig config;
    config.criterion = SplitCriterion::kGini;
    config.max_depth = params.tree.max_depth;
    config.min_child = params.tree.min_samples_leaf;
    config.min_gain = params.tree.min_gain;
    config.features_per_node = per_node;
    config.seed = derive_seed(tree_seed, "splits");
    model.trees[i] = internal::grow_tree(data, presorted, weights, {}, {}, config);
    model.tree_seeds[i] = tree_seed;
  }
  return model;
}

double log_loss(const std::vector<uint8_t>& labels, const std::vector<double>& p_pass) {
  double sum = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(p_pass[i], 1e-15, 1.0 - 1e-15);
    sum -= labels[i] == kPass ? std::log(p) : std::log1p(-p);
  }
  return labels.empty() ? 0.0 : sum / static_cast<double>(labels.size());
}

TreeEnsemble fit_gbm(const LabeledDataset& data, const TrainParams& params,
                     uint64_t seed, BoostTrace* trace) {
  params.validate();
  data.require_both_classes();
  const size_t n = data.n_rows;
  const Presorted presorted = Presorted::build(data);

  std::vector<double> y(n);
  double prevalence = 0.0;
  for (size_t r = 0; r < n; ++r) {
    y[r] = data.labels[r] == kPass ? 1.0 : 0.0;
    prevalence += y[r];
  }
  prevalence /= static_cast<double>(n);

  TreeEnsemble model;
  model.mode = EnsembleMode::kBoosted;
  model.feature_names = data.feature_names;
  model.base_score = std::log(prevalence / (1.0 - prevalence));
  model.learning_rate = params.boost.learning_rate;

  GrowConfig config;
  config.criterion = SplitCriterion::kNewton;
  config.max_depth = params.boost.max_depth;
  config.min_child = params.boost.min_child_weight;
  config.min_gain = 0.0;
  config.lambda = params.boost.lambda;
  config.gamma = params.boost.gamma;

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<double> prob(n);
  const std::vector<double> weights = ones(n);

  auto record_loss = [&] {
    if (trace == nullptr) return;
    for (size_t r = 0; r < n; ++r) prob[r] = sigmoid(margin[r]);
    trace->train_logloss.push_back(log_loss(data.labels, prob));
  };
  record_loss();

  for (int round = 0; round < params.boost.n_rounds; ++round) {
    for (size_t r = 0; r < n; ++r) {
      const double p = sigmoid(margin[r]);
      grad[r] = p - y[r];
      hess[r] = p * (1.0 - p);
    }
    config.seed = derive_seed(seed, "boost-round", static_cast<uint64_t>(round));
    Tree tree = internal::grow_tree(data, presorted, weights, grad, hess, config);
    for (size_t r = 0; r < n; ++r) {
      margin[r] += model.learning_rate * tree.predict(data.row(r));
    }
    model.trees.push_back(std::move(tree));
    model.tree_seeds.push_back(config.seed);
    record_loss();
  }
  return model;
}

}  // namespace eduml
