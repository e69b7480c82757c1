#ifndef EDUML_SHAP_H_
#define EDUML_SHAP_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eduml/dataset.h"
#include "eduml/tree.h"

namespace eduml {

struct RowAttribution {
  double base_value = 0.0;
  std::vector<double> values;  // one per feature, raw-margin units
};

struct AttributionMatrix {
  double base_value = 0.0;
  size_t n_rows = 0;
  size_t n_features = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> feature_names;
  std::string background;  // description of the reference rows

  double at(size_t row, size_t feature) const { return values[row * n_features + feature]; }
};

// Exact Shapley values of the interventional value function
//   v(S) = mean over background z of margin(x_S, z_not_S),
// computed tree by tree. For each leaf, background rows are grouped by which
// path conditions they satisfy; a row x and a background row z then
// contribute in closed form, so the cost is independent of 2^features.
class TreeShapExplainer {
 public:
  TreeShapExplainer(const TreeEnsemble& model, const LabeledDataset& background);
  ~TreeShapExplainer();
  TreeShapExplainer(TreeShapExplainer&&) noexcept;
  TreeShapExplainer& operator=(TreeShapExplainer&&) noexcept;

  double base_value() const { return base_value_; }
  RowAttribution explain(std::span<const double> row) const;
  AttributionMatrix explain_all(const LabeledDataset& rows) const;

 private:
  struct Leaf;
  size_t n_features_ = 0;
  double base_value_ = 0.0;
  double scale_ = 1.0;
  std::vector<std::string> feature_names_;
  std::vector<Leaf> leaves_;
  size_t background_rows_ = 0;
};

RowAttribution tree_shap(const TreeEnsemble& model, std::span<const double> row,
                         const LabeledDataset& background);

// Brute-force reference: enumerates all 2^M coalitions of the same value
// function. Throws TooManyFeatures when M > 15.
RowAttribution shap_oracle(const TreeEnsemble& model, std::span<const double> row,
                           const LabeledDataset& background);

inline constexpr size_t kMaxOracleFeatures = 15;

// Background reference rows: all rows when n <= cap, else a seeded sample of
// cap rows kept in original order.
LabeledDataset select_background(const LabeledDataset& data, size_t cap, uint64_t seed);

}  // namespace eduml

#endif  // EDUML_SHAP_H_
