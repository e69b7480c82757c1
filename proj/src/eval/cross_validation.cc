#include "eduml/cross_validation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eduml/csv.h"
#include "eduml/error.h"
#include "eduml/metrics.h"
#include "eduml/predict.h"
#include "eduml/rng.h"
#include "eduml/table.h"
#include "eduml/trainers.h"

namespace eduml {
namespace {

std::string percent(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

std::string cell_text(const GridCell& cell) {
  std::string out;
  for (const auto& [name, value] : cell) {
    if (!out.empty()) out += ';';
    out += name + "=" + format_number(value);
  }
  return out;
}

}  // namespace

std::vector<size_t> FoldPlan::test_rows(size_t fold) const {
  std::vector<size_t> out;
  for (size_t r = 0; r < assignments.size(); ++r) {
    if (assignments[r] == fold) out.push_back(r);
  }
  return out;
}

std::vector<size_t> FoldPlan::train_rows(size_t fold) const {
  std::vector<size_t> out;
  for (size_t r = 0; r < assignments.size(); ++r) {
    if (assignments[r] != fold) out.push_back(r);
  }
  return out;
}

FoldPlan stratified_kfold(std::span<const uint8_t> labels, size_t k, uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidParameter, "k must be >= 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), 0);
  size_t counter = 0;
  for (uint8_t cls : {kFail, kPass}) {
    std::vector<size_t> members;
    for (size_t r = 0; r < labels.size(); ++r) {
      if (labels[r] == cls) members.push_back(r);
    }
    if (members.empty()) {
      throw Error(ErrorCode::kTooFewRows,
                  std::string("no ") + (cls == kFail ? "fail" : "pass") + " rows to stratify");
    }
    Rng rng(derive_seed(seed, "fold-class", cls));
    rng.shuffle(std::span<size_t>(members));
    for (size_t r : members) plan.assignments[r] = static_cast<uint32_t>(counter++ % k);
  }
  return plan;
}

const char* model_family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::kTree: return "tree";
    case ModelFamily::kForest: return "forest";
    case ModelFamily::kBoosted: return "boosted";
    case ModelFamily::kLogistic: return "logistic";
    case ModelFamily::kMajority: return "majority";
  }
  return "?";
}

ModelFamily parse_model_family(const std::string& name) {
  for (ModelFamily f : {ModelFamily::kTree, ModelFamily::kForest, ModelFamily::kBoosted,
                        ModelFamily::kLogistic, ModelFamily::kMajority}) {
    if (name == model_family_name(f)) return f;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown model family '" + name + "'");
}

EncodingMode encoding_for(ModelFamily family) {
  return family == ModelFamily::kLogistic ? EncodingMode::kLinear : EncodingMode::kTree;
}

FittedModel fit_model(const ModelSpec& spec, const LabeledDataset& data, uint64_t seed) {
  switch (spec.family) {
    case ModelFamily::kTree: return fit_tree(data, spec.params, seed);
    case ModelFamily::kForest: return fit_forest(data, spec.params, seed);
    case ModelFamily::kBoosted: return fit_gbm(data, spec.params, seed);
    case ModelFamily::kLogistic: return fit_logreg(data, spec.params);
    case ModelFamily::kMajority: {
      data.require_both_classes();
      return ConstantModel{static_cast<double>(data.count(kPass)) /
                           static_cast<double>(data.n_rows)};
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown model family");
}

std::vector<double> predict_pass(const FittedModel& model, const LabeledDataset& data) {
  if (const auto* m = std::get_if<ConstantModel>(&model)) {
    return std::vector<double>(data.n_rows, m->p_pass);
  }
  if (const auto* m = std::get_if<LinearModel>(&model)) return predict_proba(*m, data);
  return predict_proba(std::get<TreeEnsemble>(model), data);
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  double sum = 0.0;
  s.min = std::nan("");
  s.max = std::nan("");
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    s.min = s.n == 0 ? v : std::min(s.min, v);
    s.max = s.n == 0 ? v : std::max(s.max, v);
    ++s.n;
  }
  if (s.n == 0) {
    s.mean = s.sd = std::nan("");
    return s;
  }
  s.mean = std::clamp(sum / static_cast<double>(s.n), s.min, s.max);
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
  }
  s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  return s;
}

EvalReport cross_validate(const LabeledDataset& data, const ModelSpec& spec,
                          const CvOptions& options) {
  if (options.reps < 1) throw Error(ErrorCode::kInvalidParameter, "reps must be >= 1");
  spec.params.validate();
  EvalReport report;
  report.model = spec.name;
  report.family = spec.family;
  report.params = spec.params;
  report.options = options;

  const bool balance = options.balance && spec.family != ModelFamily::kMajority;
  for (size_t rep = 0; rep < options.reps; ++rep) {
    const uint64_t rep_seed = derive_seed(options.seed, "cv-rep", rep);
    const FoldPlan plan = stratified_kfold(data.labels, options.k, rep_seed);
    for (size_t fold = 0; fold < options.k; ++fold) {
      const std::string where =
          "cv " + spec.name + " rep " + std::to_string(rep) + " fold " + std::to_string(fold);
      try {
        std::vector<size_t> train = plan.train_rows(fold);
        const std::vector<size_t> test = plan.test_rows(fold);
        if (balance) {
          std::vector<uint8_t> train_labels;
          for (size_t r : train) train_labels.push_back(data.labels[r]);
          const std::vector<size_t> keep =
              balanced_indices(train_labels, derive_seed(rep_seed, "balance", fold));
          std::vector<size_t> balanced;
          for (size_t i : keep) balanced.push_back(train[i]);
          train = std::move(balanced);
        }
        const LabeledDataset train_data = data.subset(train);
        const LabeledDataset test_data = data.subset(test);
        const uint64_t fit_seed = derive_seed(rep_seed, "fit", fold);
        const FittedModel model = fit_model(spec, train_data, fit_seed);
        const std::vector<double> p_pass = predict_pass(model, test_data);
        std::vector<double> p_fail(p_pass.size());
        for (size_t i = 0; i < p_pass.size(); ++i) p_fail[i] = 1.0 - p_pass[i];

        FoldRecord rec;
        rec.rep = rep;
        rec.fold = fold;
        rec.seed = fit_seed;
        rec.n_train = train.size();
        rec.n_test = test.size();
        const ConfusionMetrics m = confusion_metrics(test_data.labels, p_fail, options.threshold);
        rec.accuracy = m.accuracy;
        rec.sensitivity = m.sensitivity;
        rec.specificity = m.specificity;
        const size_t n_fail = test_data.count(kFail);
        rec.auc = n_fail > 0 && n_fail < test_data.n_rows ? roc_auc(test_data.labels, p_fail)
                                                          : std::nan("");
        report.folds.push_back(rec);
      } catch (const Error& e) {
        throw e.with_context(where);
      }
    }
  }
  auto collect = [&](double FoldRecord::*field) {
    std::vector<double> v;
    for (const FoldRecord& f : report.folds) v.push_back(f.*field);
    return summarize(v);
  };
  report.accuracy = collect(&FoldRecord::accuracy);
  report.sensitivity = collect(&FoldRecord::sensitivity);
  report.specificity = collect(&FoldRecord::specificity);
  report.auc = collect(&FoldRecord::auc);
  return report;
}

std::vector<GridCell> expand_grid(const ParameterGrid& grid) {
  std::vector<GridCell> cells = {{}};
  for (const auto& [name, values] : grid) {
    if (values.empty()) {
      throw Error(ErrorCode::kEmptyGrid, "parameter '" + name + "' has no values");
    }
    std::vector<GridCell> next;
    for (const GridCell& cell : cells) {
      for (double v : values) {
        GridCell c = cell;
        c.emplace_back(name, v);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

GridSearchResult grid_search(const LabeledDataset& data, const ModelSpec& spec,
                             const std::vector<GridCell>& cells, const CvOptions& options) {
  if (cells.empty()) throw Error(ErrorCode::kEmptyGrid, "grid has no cells");
  GridSearchResult result;
  result.cells = cells;
  double best_auc = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < cells.size(); ++i) {
    ModelSpec cell_spec = spec;
    for (const auto& [name, value] : cells[i]) cell_spec.params.set(name, value);
    result.reports.push_back(cross_validate(data, cell_spec, options));
    const double auc = result.reports.back().auc.mean;
    if (auc > best_auc || (i == 0 && std::isnan(auc))) {
      if (!std::isnan(auc)) best_auc = auc;
      result.best_index = i;
      result.best_params = cell_spec.params;
    }
  }
  return result;
}

std::string performance_csv(const std::vector<EvalReport>& reports) {
  std::string out = "model,accuracy,sensitivity,specificity,auc\n";
  for (const EvalReport& r : reports) {
    out += csv_line({r.model, percent(r.accuracy.mean), percent(r.sensitivity.mean),
                     percent(r.specificity.mean), percent(r.auc.mean)});
  }
  return out;
}

std::string folds_csv(const std::vector<EvalReport>& reports) {
  std::string out = "model,rep,fold,n_train,n_test,accuracy,sensitivity,specificity,auc\n";
  for (const EvalReport& r : reports) {
    for (const FoldRecord& f : r.folds) {
      out += csv_line({r.model, std::to_string(f.rep), std::to_string(f.fold),
                       std::to_string(f.n_train), std::to_string(f.n_test),
                       format_number(f.accuracy), format_number(f.sensitivity),
                       format_number(f.specificity), format_number(f.auc)});
    }
  }
  return out;
}

std::string grid_csv(const std::string& model, const GridSearchResult& result) {
  std::string out;
  for (size_t i = 0; i < result.cells.size(); ++i) {
    const EvalReport& r = result.reports[i];
    out += csv_line({model, std::to_string(i), cell_text(result.cells[i]),
                     format_number(r.accuracy.mean), format_number(r.auc.mean),
                     i == result.best_index ? "1" : "0"});
  }
  return out;
}

}  // namespace eduml
