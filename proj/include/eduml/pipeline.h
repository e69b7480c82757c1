#ifndef EDUML_PIPELINE_H_
#define EDUML_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eduml/cross_validation.h"
#include "eduml/schema.h"
#include "eduml/transforms.h"

namespace eduml {

struct InputSpec {
  std::string name;
  std::filesystem::path path;         // CSV file; unused when synthesized
  std::filesystem::path schema_path;  // schema file
  SchemaSpec schema;
  // Synthesized inputs: rows, planted signal and a seed index.
  std::optional<size_t> synth_rows;
  std::string synth_signal;
};

struct StepSpec {
  enum class Op { kMerge, kModeAggregate, kCountAggregate, kRatio, kDropSparse };
  Op op = Op::kMerge;
  std::string input;   // left table for merges
  std::string right;   // merge right table
  std::string output;  // defaults to input
  std::string key;
  std::string right_key;
  JoinCardinality cardinality = JoinCardinality::kOneToOne;
  std::string group;
  std::vector<std::string> values;
  std::vector<AggregateSpec> aggregates;
  std::string keys_from;
  std::string numerator;
  std::string denominator;
  std::string name;
  double max_missing_fraction = 0.5;
  std::vector<std::string> keep;
};

struct ModelConfig {
  ModelSpec spec;
  ParameterGrid grid;
};

struct HistogramConfig {
  std::string column;
  size_t bins = 20;
};

struct PipelineConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::vector<InputSpec> inputs;
  std::vector<StepSpec> steps;
  std::string dataset;  // table used for modelling
  std::string score;
  LabelRule label;
  std::vector<ModelConfig> models;
  CvOptions cv;
  size_t grid_reps = 1;
  size_t background_cap = 500;
  size_t explain_cap = 0;  // 0 = explain every row
  std::string shap_model;  // model name; default = first boosted model
  std::string linear_model;
  int tree_export_depth = 3;
  std::vector<std::string> assoc_variables;  // default: every feature column
  std::string summary_group = kOutcomeColumn;
  std::vector<std::string> frequency_columns;
  std::vector<std::string> summary_columns;
  std::string quantile_column;
  int quantile_k = 4;
  std::vector<HistogramConfig> histograms;
  std::string config_sha256;
};

// Parses the JSON configuration. Throws InvalidConfig, or the schema errors
// of the referenced schema files.
PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Stages a subcommand runs; preparation (ingest, merge, label) always runs.
struct StageSelection {
  bool write_dataset = false;
  bool train = false;
  bool evaluate = false;
  bool explain = false;
  bool assoc = false;
  bool report = false;

  static StageSelection all();
};

struct ProducedFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  size_t bytes = 0;
};

struct RunManifest {
  std::string json;  // manifest.json contents
  std::vector<ProducedFile> files;
};

// Runs the selected stages, staging outputs in a sibling directory and
// moving them into config.output_dir only when every stage succeeded.
// Errors carry a "[stage]" prefix.
RunManifest run_pipeline(const PipelineConfig& config, const StageSelection& stages);

}  // namespace eduml

#endif  // EDUML_PIPELINE_H_
