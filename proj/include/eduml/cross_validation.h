#ifndef EDUML_CROSS_VALIDATION_H_
#define EDUML_CROSS_VALIDATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eduml/dataset.h"
#include "eduml/logistic.h"
#include "eduml/train_params.h"
#include "eduml/tree.h"

namespace eduml {

struct FoldPlan {
  size_t k = 0;
  uint64_t seed = 0;
  std::vector<uint32_t> assignments;  // fold index per row

  std::vector<size_t> test_rows(size_t fold) const;
  std::vector<size_t> train_rows(size_t fold) const;
};

// Shuffles each class with a seeded generator, then deals rows round-robin;
// the fold counter carries over from the fail class to the pass class.
// Throws TooFewRows when a class is empty.
FoldPlan stratified_kfold(std::span<const uint8_t> labels, size_t k, uint64_t seed);

enum class ModelFamily { kTree, kForest, kBoosted, kLogistic, kMajority };

const char* model_family_name(ModelFamily family);
ModelFamily parse_model_family(const std::string& name);
// Tree families consume tree-mode encodings, logistic needs linear mode.
EncodingMode encoding_for(ModelFamily family);

struct ModelSpec {
  std::string name;
  ModelFamily family = ModelFamily::kBoosted;
  TrainParams params;
};

// Predicts the training prevalence of pass for every row.
struct ConstantModel {
  double p_pass = 0.5;
  bool operator==(const ConstantModel&) const = default;
};

using FittedModel = std::variant<TreeEnsemble, LinearModel, ConstantModel>;

FittedModel fit_model(const ModelSpec& spec, const LabeledDataset& data, uint64_t seed);
std::vector<double> predict_pass(const FittedModel& model, const LabeledDataset& data);

struct CvOptions {
  size_t k = 10;
  size_t reps = 10;
  uint64_t seed = 0;
  bool balance = true;
  double threshold = 0.5;
};

struct FoldRecord {
  size_t rep = 0;
  size_t fold = 0;
  uint64_t seed = 0;
  size_t n_train = 0;
  size_t n_test = 0;
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double auc = 0.0;  // NaN when the test fold holds one class
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  size_t n = 0;  // folds with a defined value
};

struct EvalReport {
  std::string model;
  ModelFamily family = ModelFamily::kBoosted;
  TrainParams params;
  CvOptions options;
  std::vector<FoldRecord> folds;  // (rep, fold) order
  MetricSummary accuracy;
  MetricSummary sensitivity;
  MetricSummary specificity;
  MetricSummary auc;
};

// Repeated stratified k-fold CV. Repetition r uses the fold plan seeded by
// derive_seed(seed, "cv-rep", r). With `balance`, each training fold is
// undersampled; test folds never are. The majority baseline always trains on
// the unbalanced fold, since balancing would erase the majority it predicts.
EvalReport cross_validate(const LabeledDataset& data, const ModelSpec& spec,
                          const CvOptions& options);

MetricSummary summarize(const std::vector<double>& values);

// One grid cell: parameter overrides applied on top of the spec's params.
using GridCell = std::vector<std::pair<std::string, double>>;
using ParameterGrid = std::vector<std::pair<std::string, std::vector<double>>>;

// Cartesian product in declaration order; the last parameter varies fastest.
std::vector<GridCell> expand_grid(const ParameterGrid& grid);

struct GridSearchResult {
  size_t best_index = 0;
  TrainParams best_params;
  std::vector<GridCell> cells;
  std::vector<EvalReport> reports;
};

// Picks the cell with the highest mean CV AUC; ties keep the earliest cell.
// Throws EmptyGrid.
GridSearchResult grid_search(const LabeledDataset& data, const ModelSpec& spec,
                             const std::vector<GridCell>& cells, const CvOptions& options);

// Table-3 style summary (percent, 1 decimal) and the long per-fold table.
std::string performance_csv(const std::vector<EvalReport>& reports);
std::string folds_csv(const std::vector<EvalReport>& reports);
std::string grid_csv(const std::string& model, const GridSearchResult& result);

}  // namespace eduml

#endif  // EDUML_CROSS_VALIDATION_H_
