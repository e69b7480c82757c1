#include "eduml/predict.h"

#include "eduml/error.h"

namespace eduml {

void check_features(const std::vector<std::string>& expected, const LabeledDataset& data) {
  if (expected == data.feature_names) return;
  std::string detail;
  if (expected.size() != data.feature_names.size()) {
    detail = "model has " + std::to_string(expected.size()) + " features, data has " +
             std::to_string(data.feature_names.size());
  } else {
    for (size_t j = 0; j < expected.size(); ++j) {
      if (expected[j] != data.feature_names[j]) {
        detail = "feature " + std::to_string(j) + " is '" + data.feature_names[j] +
                 "', model expects '" + expected[j] + "'";
        break;
      }
    }
  }
  throw Error(ErrorCode::kFeatureMismatch, detail);
}

std::vector<double> predict_proba(const TreeEnsemble& model, const LabeledDataset& data) {
  check_features(model.feature_names, data);
  std::vector<double> out(data.n_rows);
  for (size_t r = 0; r < data.n_rows; ++r) out[r] = model.predict_proba(data.row(r));
  return out;
}

std::vector<double> predict_proba(const LinearModel& model, const LabeledDataset& data) {
  check_features(model.feature_names, data);
  std::vector<double> out(data.n_rows);
  for (size_t r = 0; r < data.n_rows; ++r) out[r] = model.predict_proba(data.row(r));
  return out;
}

}  // namespace eduml
