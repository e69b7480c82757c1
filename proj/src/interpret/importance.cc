#include "eduml/importance.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eduml/csv.h"
#include "eduml/error.h"
#include "eduml/table.h"

namespace eduml {

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s = buf;
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

ShapSummary shap_summary(const AttributionMatrix& attributions, const LabeledDataset& rows) {
  const size_t n = attributions.n_rows;
  const size_t f = attributions.n_features;
  if (rows.n_rows != n || rows.n_features != f) {
    throw Error(ErrorCode::kFeatureMismatch, "attributions and rows do not align");
  }
  ShapSummary out;
  for (size_t j = 0; j < f; ++j) {
    double sum = 0.0;
    for (size_t r = 0; r < n; ++r) sum += std::abs(attributions.at(r, j));
    out.ranking.push_back({attributions.feature_names[j], n ? sum / double(n) : 0.0});
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const FeatureRank& a, const FeatureRank& b) {
                     if (a.mean_abs_shap != b.mean_abs_shap) return a.mean_abs_shap > b.mean_abs_shap;
                     return a.feature < b.feature;
                   });

  std::vector<double> lo(f, std::numeric_limits<double>::infinity());
  std::vector<double> hi(f, -std::numeric_limits<double>::infinity());
  for (size_t r = 0; r < n; ++r) {
    for (size_t j = 0; j < f; ++j) {
      const double v = rows.at(r, j);
      if (std::isnan(v)) continue;
      lo[j] = std::min(lo[j], v);
      hi[j] = std::max(hi[j], v);
    }
  }
  out.points.reserve(n * f);
  for (size_t r = 0; r < n; ++r) {
    for (size_t j = 0; j < f; ++j) {
      const double v = rows.at(r, j);
      double norm;
      if (std::isnan(v)) {
        norm = std::nan("");
      } else if (hi[j] > lo[j]) {
        norm = (v - lo[j]) / (hi[j] - lo[j]);
      } else {
        norm = 0.5;
      }
      out.points.push_back({attributions.feature_names[j], norm, attributions.at(r, j)});
    }
  }
  return out;
}

std::vector<OddsRatioRow> odds_ratio_table(
    const std::vector<std::pair<std::string, double>>& weights) {
  std::vector<OddsRatioRow> out;
  out.reserve(weights.size());
  for (const auto& [name, beta] : weights) {
    const double ratio = std::exp(beta);
    out.push_back({name, beta, ratio, 100.0 * std::expm1(beta)});
  }
  return out;
}

std::vector<OddsRatioRow> odds_ratio_table(const LinearModel& model) {
  std::vector<std::pair<std::string, double>> weights;
  for (size_t j = 0; j < model.coefficients.size(); ++j) {
    weights.emplace_back(model.feature_names[j], model.coefficients[j]);
  }
  return odds_ratio_table(weights);
}

const char* effect_side_name(EffectSide side) {
  switch (side) {
    case EffectSide::kPass: return "pass";
    case EffectSide::kFail: return "fail";
    case EffectSide::kNeutral: return "neutral";
  }
  return "?";
}

std::vector<LinearImportanceRow> linear_importance(const LinearModel& model) {
  std::vector<LinearImportanceRow> out;
  for (size_t j = 0; j < model.coefficients.size(); ++j) {
    const double w = model.coefficients[j];
    const EffectSide side = w > 0 ? EffectSide::kPass : w < 0 ? EffectSide::kFail
                                                              : EffectSide::kNeutral;
    out.push_back({model.feature_names[j], w, side});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LinearImportanceRow& a, const LinearImportanceRow& b) {
                     if (a.weight != b.weight) return a.weight > b.weight;
                     return a.feature < b.feature;
                   });
  return out;
}

std::string shap_ranking_csv(const ShapSummary& summary) {
  std::string out = "rank,feature,mean_abs_shap\n";
  for (size_t i = 0; i < summary.ranking.size(); ++i) {
    out += csv_line({std::to_string(i + 1), summary.ranking[i].feature,
                     format_number(summary.ranking[i].mean_abs_shap)});
  }
  return out;
}

std::string beeswarm_csv(const ShapSummary& summary) {
  std::string out = "feature,feature_value_norm,shap\n";
  for (const BeeswarmPoint& p : summary.points) {
    out += csv_line({p.feature, format_number(p.feature_value_norm), format_number(p.shap)});
  }
  return out;
}

std::string odds_ratio_csv(const std::vector<OddsRatioRow>& rows) {
  std::string out = "variable,weight,odd_ratio,pct_change\n";
  for (const OddsRatioRow& r : rows) {
    out += csv_line({r.feature, format_fixed(r.weight, 2), format_fixed(r.odds_ratio, 2),
                     format_fixed(r.pct_change, 2)});
  }
  return out;
}

std::string linear_importance_csv(const std::vector<LinearImportanceRow>& rows) {
  std::string out = "feature,weight,side\n";
  for (const LinearImportanceRow& r : rows) {
    out += csv_line({r.feature, format_number(r.weight), effect_side_name(r.side)});
  }
  return out;
}

}  // namespace eduml
