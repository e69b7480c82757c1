#ifndef EDUML_IMPORTANCE_H_
#define EDUML_IMPORTANCE_H_

#include <string>
#include <utility>
#include <vector>

#include "eduml/dataset.h"
#include "eduml/logistic.h"
#include "eduml/shap.h"

namespace eduml {

struct FeatureRank {
  std::string feature;
  double mean_abs_shap = 0.0;
};

struct BeeswarmPoint {
  std::string feature;
  double feature_value_norm = 0.0;  // NaN when the cell is missing
  double shap = 0.0;
};

struct ShapSummary {
  std::vector<FeatureRank> ranking;   // mean |SHAP| descending, ties by name
  std::vector<BeeswarmPoint> points;  // row-major over (row, feature)
};

// Feature values are min-max scaled per feature over the explained rows;
// constant features map to 0.5.
ShapSummary shap_summary(const AttributionMatrix& attributions, const LabeledDataset& rows);

struct OddsRatioRow {
  std::string feature;
  double weight = 0.0;
  double odds_ratio = 1.0;
  double pct_change = 0.0;
};

std::vector<OddsRatioRow> odds_ratio_table(const LinearModel& model);
std::vector<OddsRatioRow> odds_ratio_table(
    const std::vector<std::pair<std::string, double>>& weights);

enum class EffectSide { kPass, kFail, kNeutral };
const char* effect_side_name(EffectSide side);

struct LinearImportanceRow {
  std::string feature;
  double weight = 0.0;
  EffectSide side = EffectSide::kNeutral;
};

// Coefficients sorted by weight descending (ties by name). Positive weights
// raise the odds of passing.
std::vector<LinearImportanceRow> linear_importance(const LinearModel& model);

std::string shap_ranking_csv(const ShapSummary& summary);
std::string beeswarm_csv(const ShapSummary& summary);
std::string odds_ratio_csv(const std::vector<OddsRatioRow>& rows);
std::string linear_importance_csv(const std::vector<LinearImportanceRow>& rows);

// Fixed-point text with `decimals` places; never prints "-0.00".
std::string format_fixed(double value, int decimals);

}  // namespace eduml

#endif  // EDUML_IMPORTANCE_H_
