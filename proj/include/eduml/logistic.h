#ifndef EDUML_LOGISTIC_H_
#define EDUML_LOGISTIC_H_

#include <span>
#include <string>
#include <vector>

#include "eduml/dataset.h"
#include "eduml/train_params.h"

namespace eduml {

// L2-regularized logistic regression on the pass outcome. Coefficients are
// pass log-odds per unit of each encoded feature.
struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  std::vector<std::string> feature_names;
  double lambda = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  double tolerance = 0.0;

  double margin(std::span<const double> row) const;
  double predict_proba(std::span<const double> row) const;
  bool operator==(const LinearModel&) const = default;
};

struct LogisticObjective {
  double value = 0.0;
  std::vector<double> gradient;  // intercept first, then coefficients
};

// Negative log-likelihood plus (lambda/2)*||beta||^2 (intercept unpenalized)
// at params = [intercept, beta...].
LogisticObjective logistic_objective(const LabeledDataset& data, double lambda,
                                     std::span<const double> params);

// Damped Newton with step halving. Throws NonConvergence when the gradient
// norm is still above params.linear.tolerance after max_iterations.
LinearModel fit_logreg(const LabeledDataset& data, const TrainParams& params);

}  // namespace eduml

#endif  // EDUML_LOGISTIC_H_
