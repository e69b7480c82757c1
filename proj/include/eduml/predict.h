#ifndef EDUML_PREDICT_H_
#define EDUML_PREDICT_H_

#include <vector>

#include "eduml/dataset.h"
#include "eduml/logistic.h"
#include "eduml/tree.h"

namespace eduml {

// Pass probabilities for every row. Throws FeatureMismatch when the
// dataset's feature names differ from the model's.
std::vector<double> predict_proba(const TreeEnsemble& model, const LabeledDataset& data);
std::vector<double> predict_proba(const LinearModel& model, const LabeledDataset& data);

void check_features(const std::vector<std::string>& expected, const LabeledDataset& data);

}  // namespace eduml

#endif  // EDUML_PREDICT_H_
