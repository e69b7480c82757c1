#include <bit>
#include <cmath>
#include <vector>

#include "eduml/error.h"
#include "eduml/shap.h"

namespace eduml {

RowAttribution shap_oracle(const TreeEnsemble& model, std::span<const double> row,
                           const LabeledDataset& background) {
  const size_t m = model.feature_names.size();
  if (m > kMaxOracleFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                std::to_string(m) + " features; the oracle enumerates at most " +
                    std::to_string(kMaxOracleFeatures));
  }
  if (background.n_rows == 0) throw Error(ErrorCode::kEmptyBackground, "no background rows");
  if (row.size() != m || background.n_features != m) {
    throw Error(ErrorCode::kFeatureMismatch, "row or background width differs from the model");
  }

  const size_t n_coalitions = size_t{1} << m;
  std::vector<double> value(n_coalitions, 0.0);
  std::vector<double> mixed(m);
  for (size_t s = 0; s < n_coalitions; ++s) {
    double sum = 0.0;
    for (size_t r = 0; r < background.n_rows; ++r) {
      const auto z = background.row(r);
      for (size_t j = 0; j < m; ++j) mixed[j] = (s >> j) & 1 ? row[j] : z[j];
      sum += model.margin(mixed);
    }
    value[s] = sum / static_cast<double>(background.n_rows);
  }

  // |S|! (M - |S| - 1)! / M!
  std::vector<double> weight(m, 0.0);
  for (size_t k = 0; k < m; ++k) {
    weight[k] = std::exp(std::lgamma(double(k) + 1) + std::lgamma(double(m - k)) -
                         std::lgamma(double(m) + 1));
  }

  RowAttribution out;
  out.base_value = value[0];
  out.values.assign(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    const size_t bit = size_t{1} << i;
    for (size_t s = 0; s < n_coalitions; ++s) {
      if (s & bit) continue;
      const size_t size = static_cast<size_t>(std::popcount(s));
      out.values[i] += weight[size] * (value[s | bit] - value[s]);
    }
  }
  return out;
}

}  // namespace eduml
