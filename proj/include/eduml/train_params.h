#ifndef EDUML_TRAIN_PARAMS_H_
#define EDUML_TRAIN_PARAMS_H_

#include <string>
#include <utility>
#include <vector>

namespace eduml {

struct TreeParams {
  int max_depth = 6;
  int min_samples_leaf = 5;
  double min_gain = 1e-7;
};

struct ForestParams {
  int n_trees = 200;
  bool bootstrap = true;
  // Fraction of features drawn per split; <= 0 selects floor(sqrt(n)).
  double feature_fraction = 0.0;
};

struct BoostParams {
  int n_rounds = 200;
  double learning_rate = 0.1;
  double lambda = 1.0;  // L2 penalty on leaf weights
  double gamma = 0.0;   // per-split penalty
  int max_depth = 6;
  double min_child_weight = 1.0;  // minimum hessian sum per child
};

struct LinearParams {
  double lambda = 1.0;
  double tolerance = 1e-8;
  int max_iterations = 100;
};

struct TrainParams {
  TreeParams tree;
  ForestParams forest;
  BoostParams boost;
  LinearParams linear;

  // Throws InvalidParameter on counts < 1, negative penalties or rates.
  void validate() const;

  // Dotted names such as "tree.max_depth" or "boost.learning_rate".
  void set(const std::string& name, double value);
  double get(const std::string& name) const;
  static const std::vector<std::string>& parameter_names();
};

}  // namespace eduml

#endif  // EDUML_TRAIN_PARAMS_H_
