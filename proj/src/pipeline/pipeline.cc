#include "eduml/pipeline.h"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>

#include "eduml/association.h"
#include "eduml/csv.h"
#include "eduml/dataset.h"
#include "eduml/descriptive.h"
#include "eduml/digest.h"
#include "eduml/error.h"
#include "eduml/importance.h"
#include "eduml/model_io.h"
#include "eduml/rng.h"
#include "eduml/shap.h"
#include "eduml/synth.h"
#include "eduml/trainers.h"
#include "eduml/tree_export.h"

namespace eduml {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kManifestVersion = 1;
constexpr double kAlpha = 0.05;

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (alnum) {
      out.push_back(c);
    } else if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "model" : out;
}

// Files written under a staging directory, in write order.
class Staging {
 public:
  explicit Staging(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::remove_all(dir_, ec);
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& rel, const std::string& content) {
    const fs::path path = dir_ / rel;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    write_text_file(path, content);
    files_.push_back({rel, sha256_hex(content), content.size()});
  }

  const std::vector<ProducedFile>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

  void discard() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  void publish(const fs::path& out, const std::vector<std::string>& extra) {
    std::error_code ec;
    if (!fs::exists(out)) {
      fs::create_directories(out.parent_path().empty() ? fs::path(".") : out.parent_path(), ec);
      fs::rename(dir_, out, ec);
      if (!ec) return;
    }
    fs::create_directories(out, ec);
    std::vector<std::string> names;
    for (const ProducedFile& f : files_) names.push_back(f.path);
    names.insert(names.end(), extra.begin(), extra.end());
    for (const std::string& rel : names) {
      fs::create_directories((out / rel).parent_path(), ec);
      fs::rename(dir_ / rel, out / rel, ec);
      if (ec) {
        throw Error(ErrorCode::kIo, "cannot move " + rel + " into " + out.string() + ": " +
                                        ec.message());
      }
    }
    discard();
  }

 private:
  fs::path dir_;
  std::vector<ProducedFile> files_;
};

class Runner {
 public:
  Runner(const PipelineConfig& config, const StageSelection& stages, Staging& out)
      : config_(config), stages_(stages), out_(out) {}

  std::string run() {
    manifest_["format"] = "eduml-manifest";
    manifest_["version"] = kManifestVersion;
    manifest_["config_sha256"] = config_.config_sha256;
    manifest_["seed"] = config_.seed;
    seeds_ = Json::object();
    stage_log_ = Json::array();
    dropped_columns_ = Json::array();
    dropped_rows_ = Json::array();
    notes_ = Json::array();
    skipped_ = Json::array();

    staged("ingest", [&] { ingest(); });
    staged("merge", [&] { apply_steps(); });
    staged("label", [&] { label(); });
    staged("encode", [&] { encode(); });
    if (stages_.write_dataset) staged("export", [&] { out_.write("dataset.csv", table_to_csv(table_)); });
    if (stages_.evaluate) staged("evaluate", [&] { evaluate(); });
    if (stages_.train || stages_.explain) staged("train", [&] { train(); });
    if (stages_.explain) staged("explain", [&] { explain(); });
    if (stages_.assoc) staged("assoc", [&] { assoc(); });
    if (stages_.report) staged("report", [&] { report(); });

    manifest_["seeds"] = seeds_;
    manifest_["stages"] = stage_log_;
    manifest_["dropped_columns"] = dropped_columns_;
    manifest_["dropped_rows"] = dropped_rows_;
    manifest_["skipped_tests"] = skipped_;
    manifest_["notes"] = notes_;
    Json files = Json::array();
    for (const ProducedFile& f : out_.files()) {
      files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    manifest_["files"] = files;
    return manifest_.dump(2) + "\n";
  }

 private:
  template <typename F>
  void staged(const std::string& stage, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      throw e.with_context(stage);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kIo, std::string(e.what())).with_context(stage);
    }
  }

  void log_stage(const std::string& stage, const Table& t, Json extra = Json::object()) {
    Json entry = {{"stage", stage}, {"rows", t.n_rows()}, {"columns", t.n_columns()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) entry[it.key()] = it.value();
    stage_log_.push_back(entry);
  }

  const Table& table_named(const std::string& name) const {
    auto it = tables_.find(name);
    if (it == tables_.end()) throw Error(ErrorCode::kInvalidConfig, "unknown table '" + name + "'");
    return it->second;
  }

  void ingest() {
    for (size_t i = 0; i < config_.inputs.size(); ++i) {
      const InputSpec& in = config_.inputs[i];
      Table t;
      try {
        if (in.synth_rows) {
          const uint64_t seed = derive_seed(config_.seed, "synth-input", i);
          seeds_["synth:" + in.name] = seed;
          t = synth_generate(in.schema, *in.synth_rows, parse_signal(in.synth_signal), seed);
        } else {
          t = read_table(in.path, in.schema);
        }
      } catch (const Error& e) {
        throw e.with_context(in.name);
      }
      schema_ = schema_.merged_with(in.schema);
      log_stage("ingest:" + in.name, t);
      tables_[in.name] = std::move(t);
    }
  }

  void declare_numeric(const std::string& name, ColumnKind kind) {
    ColumnSpec spec;
    spec.name = name;
    spec.role = ColumnRole::kFeature;
    spec.kind = kind;
    schema_.upsert(spec);
  }

  void apply_steps() {
    for (size_t i = 0; i < config_.steps.size(); ++i) {
      const StepSpec& s = config_.steps[i];
      const std::string where = "step " + std::to_string(i);
      Table result;
      Json extra = Json::object();
      try {
        const Table& input = table_named(s.input);
        switch (s.op) {
          case StepSpec::Op::kMerge:
            result = merge_on_key(input, table_named(s.right), s.key, s.cardinality, s.right_key);
            extra["left_rows"] = input.n_rows();
            extra["right_rows"] = table_named(s.right).n_rows();
            break;
          case StepSpec::Op::kModeAggregate:
            result = mode_aggregate_by_group(input, s.group, s.values);
            break;
          case StepSpec::Op::kCountAggregate: {
            const Table* keys = s.keys_from.empty() ? nullptr : &table_named(s.keys_from);
            result = count_aggregate_by_group(input, s.key, s.aggregates, keys);
            for (const AggregateSpec& a : s.aggregates) {
              declare_numeric(a.output_name(), a.kind == AggregateSpec::Kind::kMean
                                                   ? ColumnKind::kNumeric
                                                   : ColumnKind::kInteger);
            }
            break;
          }
          case StepSpec::Op::kRatio: {
            RatioResult r = add_ratio_column(input, s.numerator, s.denominator, s.name);
            declare_numeric(s.name, ColumnKind::kNumeric);
            extra["zero_denominator"] = r.zero_denominator;
            result = std::move(r.table);
            break;
          }
          case StepSpec::Op::kDropSparse: {
            std::vector<std::string> keep = s.keep;
            keep.push_back(config_.score);
            for (const std::string& k : schema_.names_with_role(ColumnRole::kKey)) keep.push_back(k);
            SparseDropResult r = drop_sparse_columns(input, s.max_missing_fraction, keep);
            for (const DroppedColumn& d : r.dropped) {
              dropped_columns_.push_back({{"table", s.output},
                                          {"column", d.name},
                                          {"missing_fraction", d.missing_fraction},
                                          {"reason", "missing fraction above " +
                                                         format_number(s.max_missing_fraction)}});
            }
            result = std::move(r.table);
            break;
          }
        }
      } catch (const Error& e) {
        throw e.with_context(where);
      }
      log_stage("step:" + std::to_string(i) + ":" + s.output, result, extra);
      tables_[s.output] = std::move(result);
    }
  }

  void label() {
    const Table& source = table_named(config_.dataset);
    LabelResult r = derive_label(source, config_.score, config_.label);
    if (r.dropped_missing_score > 0) {
      dropped_rows_.push_back({{"stage", "label"},
                               {"rows", r.dropped_missing_score},
                               {"reason", "missing score"}});
    }
    log_stage("label", r.table, {{"rows_in", source.n_rows()},
                                 {"dropped_missing_score", r.dropped_missing_score}});
    table_ = std::move(r.table);
  }

  bool needs(EncodingMode mode) const {
    return std::any_of(config_.models.begin(), config_.models.end(), [&](const ModelConfig& m) {
      return encoding_for(m.spec.family) == mode;
    });
  }

  void encode() {
    tree_data_ = encode_features(table_, schema_, EncodingMode::kTree);
    Json entry = {{"stage", "encode"},
                  {"rows", tree_data_.n_rows},
                  {"fail", tree_data_.count(kFail)},
                  {"pass", tree_data_.count(kPass)},
                  {"tree_features", tree_data_.n_features}};
    if (needs(EncodingMode::kLinear)) {
      linear_data_ = encode_features(table_, schema_, EncodingMode::kLinear);
      entry["linear_features"] = linear_data_.n_features;
    }
    stage_log_.push_back(entry);
  }

  const LabeledDataset& data_for(ModelFamily family) const {
    return encoding_for(family) == EncodingMode::kLinear ? linear_data_ : tree_data_;
  }

  void evaluate() {
    tuned_.resize(config_.models.size());
    std::vector<EvalReport> reports;
    std::string grid_out;
    CvOptions cv = config_.cv;
    cv.seed = derive_seed(config_.seed, "cv");
    seeds_["cv"] = cv.seed;
    for (size_t i = 0; i < config_.models.size(); ++i) {
      const ModelConfig& m = config_.models[i];
      ModelSpec spec = m.spec;
      const LabeledDataset& data = data_for(spec.family);
      if (!m.grid.empty()) {
        CvOptions grid_cv = cv;
        grid_cv.reps = config_.grid_reps;
        grid_cv.seed = derive_seed(config_.seed, "grid", i);
        seeds_["grid:" + spec.name] = grid_cv.seed;
        GridSearchResult g = grid_search(data, spec, expand_grid(m.grid), grid_cv);
        grid_out += grid_csv(spec.name, g);
        spec.params = g.best_params;
      }
      tuned_[i] = spec.params;
      reports.push_back(cross_validate(data, spec, cv));
      stage_log_.push_back({{"stage", "cv:" + spec.name},
                            {"folds", reports.back().folds.size()},
                            {"mean_auc", reports.back().auc.mean}});
    }
    out_.write("model_performance.csv", performance_csv(reports));
    out_.write("cv_folds.csv", folds_csv(reports));
    if (!grid_out.empty()) {
      out_.write("grid_search.csv", "model,cell,params,accuracy,auc,selected\n" + grid_out);
    }
  }

  void train() {
    fitted_.clear();
    for (size_t i = 0; i < config_.models.size(); ++i) {
      ModelSpec spec = config_.models[i].spec;
      if (i < tuned_.size()) spec.params = tuned_[i];
      const uint64_t seed = derive_seed(config_.seed, "refit", i);
      seeds_["refit:" + spec.name] = seed;
      FittedModel model = fit_model(spec, data_for(spec.family), seed);
      if (stages_.train) {
        if (const auto* t = std::get_if<TreeEnsemble>(&model)) {
          out_.write("models/" + slug(spec.name) + ".json", model_to_json(*t));
        } else if (const auto* l = std::get_if<LinearModel>(&model)) {
          out_.write("models/" + slug(spec.name) + ".json", model_to_json(*l));
        }
      }
      fitted_.emplace(spec.name, std::move(model));
    }
    notes_.push_back("interpretability exports use models refit on the full labeled dataset");
  }

  void explain() {
    if (!config_.shap_model.empty()) {
      const TreeEnsemble& model = std::get<TreeEnsemble>(fitted_.at(config_.shap_model));
      const uint64_t bg_seed = derive_seed(config_.seed, "shap-background");
      seeds_["shap_background"] = bg_seed;
      const LabeledDataset background = select_background(tree_data_, config_.background_cap, bg_seed);
      LabeledDataset rows = tree_data_;
      if (config_.explain_cap > 0) {
        const uint64_t ex_seed = derive_seed(config_.seed, "shap-explain");
        seeds_["shap_explain"] = ex_seed;
        rows = select_background(tree_data_, config_.explain_cap, ex_seed);
      }
      const AttributionMatrix attrib = TreeShapExplainer(model, background).explain_all(rows);
      const ShapSummary summary = shap_summary(attrib, rows);
      out_.write("shap_ranking.csv", shap_ranking_csv(summary));
      out_.write("shap_beeswarm.csv", beeswarm_csv(summary));
      stage_log_.push_back({{"stage", "shap"},
                            {"model", config_.shap_model},
                            {"background_rows", background.n_rows},
                            {"explained_rows", rows.n_rows},
                            {"base_value", attrib.base_value}});
      notes_.push_back("SHAP values are computed on " +
                       std::string(config_.explain_cap > 0 ? "a seeded sample of" : "all") +
                       " labeled rows, not a held-out fold");
    }
    if (!config_.linear_model.empty()) {
      const LinearModel& model = std::get<LinearModel>(fitted_.at(config_.linear_model));
      out_.write("odds_ratios.csv", odds_ratio_csv(odds_ratio_table(model)));
      out_.write("linear_importance.csv", linear_importance_csv(linear_importance(model)));
    }
    TrainParams params;
    for (size_t i = 0; i < config_.models.size(); ++i) {
      if (config_.models[i].spec.family == ModelFamily::kTree) {
        params = i < tuned_.size() ? tuned_[i] : config_.models[i].spec.params;
        break;
      }
    }
    params.tree.max_depth = config_.tree_export_depth;
    const TreeEnsemble tree = fit_tree(tree_data_, params, derive_seed(config_.seed, "tree-export"));
    out_.write("decision_tree.txt", export_tree_text(tree, config_.tree_export_depth));
    out_.write("decision_tree.dot", export_tree_dot(tree, config_.tree_export_depth));
  }

  std::vector<std::string> feature_columns() const {
    std::vector<std::string> out;
    for (const Column& col : table_.columns()) {
      const ColumnSpec* spec = schema_.find(col.name());
      if (spec != nullptr && spec->role == ColumnRole::kFeature && col.kind() != ColumnKind::kText) {
        out.push_back(col.name());
      }
    }
    return out;
  }

  void assoc() {
    const std::vector<std::string> vars =
        config_.assoc_variables.empty() ? feature_columns() : config_.assoc_variables;
    const Column& outcome = table_.column(kOutcomeColumn);
    std::string csv = "variable,test,statistic,df,p_value,significant_at_0.05\n";
    auto emit = [&](const std::string& var, const AssociationResult& r) {
      std::string df = format_number(r.df);
      if (!std::isnan(r.df2)) df += ";" + format_number(r.df2);
      csv += csv_line({var, r.test, format_number(r.statistic), df, format_number(r.p_value),
                       r.p_value < kAlpha ? "yes" : "no"});
    };
    auto skip = [&](const std::string& var, const std::string& test, const Error& e) {
      skipped_.push_back({{"variable", var}, {"test", test}, {"reason", e.what()}});
    };
    for (const std::string& var : vars) {
      const Column& col = table_.column(var);
      if (col.is_categorical()) {
        const ColumnSpec* spec = schema_.find(var);
        std::vector<std::string> order;
        if (spec != nullptr && spec->ordinal && !spec->levels.empty()) {
          for (const std::string& l : spec->levels) {
            if (col.level_code(l)) order.push_back(l);
          }
        }
        try {
          emit(var, gk_gamma(ContingencyTable::from_columns(col, outcome, order,
                                                            {kFailLevel, kPassLevel})));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerateTable) throw;
          skip(var, "gk_gamma", e);
        }
      } else if (col.is_numeric()) {
        std::vector<std::vector<double>> groups(2);
        for (size_t r = 0; r < table_.n_rows(); ++r) {
          const double v = col.number(r);
          if (std::isnan(v) || outcome.code(r) < 0) continue;
          groups[outcome.levels()[outcome.code(r)] == kFailLevel ? 0 : 1].push_back(v);
        }
        try {
          emit(var, kruskal_wallis(groups));
        } catch (const Error& e) {
          skip(var, "kruskal_wallis", e);
        }
        try {
          emit(var, anova_oneway(groups));
        } catch (const Error& e) {
          skip(var, "anova", e);
        }
      }
    }
    out_.write("associations.csv", csv);
  }

  void report() {
    std::vector<std::string> freq = config_.frequency_columns;
    std::vector<std::string> summary = config_.summary_columns;
    if (freq.empty() || summary.empty()) {
      for (const std::string& name : feature_columns()) {
        const Column& col = table_.column(name);
        if (config_.frequency_columns.empty() && col.is_categorical()) freq.push_back(name);
        if (config_.summary_columns.empty() && col.is_numeric()) summary.push_back(name);
      }
      if (config_.summary_columns.empty()) summary.insert(summary.begin(), config_.score);
    }
    std::string freq_csv = "variable,group,level,count,percent\n";
    for (const std::string& col : freq) {
      freq_csv += frequency_table_csv(frequency_table(table_, config_.summary_group, col), col);
    }
    out_.write("frequency_tables.csv", freq_csv);
    out_.write("group_summary.csv",
               group_summary_csv(group_summary(table_, config_.summary_group, summary)));

    if (!config_.quantile_column.empty()) {
      const Column& col = table_.column(config_.quantile_column);
      if (!col.is_numeric()) {
        throw Error(ErrorCode::kTypeMismatch, "quantile column must be numeric");
      }
      const QuantileBins bins = quantile_bin(col.numbers(), config_.quantile_k);
      const Column& outcome = table_.column(kOutcomeColumn);
      std::vector<size_t> count(config_.quantile_k, 0);
      std::vector<size_t> fails(config_.quantile_k, 0);
      std::vector<std::optional<std::string>> labels(table_.n_rows());
      for (size_t r = 0; r < table_.n_rows(); ++r) {
        const int b = bins.bin[r];
        if (b < 0) continue;
        ++count[b];
        if (outcome.code(r) >= 0 && outcome.levels()[outcome.code(r)] == kFailLevel) ++fails[b];
        labels[r] = bins.label(b);
      }
      std::string csv = "bin,label,lower,upper,count,fail,pass\n";
      for (int b = 0; b < config_.quantile_k; ++b) {
        const double lo = b == 0 ? bins.min : bins.edges[b - 1];
        const double hi = b + 1 == config_.quantile_k ? bins.max : bins.edges[b];
        csv += csv_line({std::to_string(b + 1), bins.label(b), format_number(lo),
                         format_number(hi), std::to_string(count[b]), std::to_string(fails[b]),
                         std::to_string(count[b] - fails[b])});
      }
      out_.write("quantile_bins.csv", csv);
      const std::string group_name = config_.quantile_column + " quantile";
      Table grouped = table_.with_column(Column::categorical(group_name, labels));
      std::string qcsv = "variable,group,level,count,percent\n";
      for (const std::string& c : freq) {
        qcsv += frequency_table_csv(frequency_table(grouped, group_name, c), c);
      }
      out_.write("quantile_frequency.csv", qcsv);
    }

    std::vector<HistogramConfig> hists = config_.histograms;
    if (hists.empty()) hists.push_back({config_.score, 20});
    std::string hcsv = "variable,bin,lower,upper,count\n";
    for (const HistogramConfig& h : hists) {
      const Column& col = table_.column(h.column);
      if (!col.is_numeric()) throw Error(ErrorCode::kTypeMismatch, "histogram column must be numeric");
      const std::vector<HistogramBin> bins = histogram(col.numbers(), h.bins);
      for (size_t b = 0; b < bins.size(); ++b) {
        hcsv += csv_line({h.column, std::to_string(b + 1), format_number(bins[b].lo),
                          format_number(bins[b].hi), std::to_string(bins[b].count)});
      }
    }
    out_.write("histograms.csv", hcsv);
  }

  const PipelineConfig& config_;
  const StageSelection& stages_;
  Staging& out_;

  Json manifest_;
  Json seeds_;
  Json stage_log_;
  Json dropped_columns_;
  Json dropped_rows_;
  Json notes_;
  Json skipped_;

  SchemaSpec schema_;
  std::map<std::string, Table> tables_;
  Table table_;
  LabeledDataset tree_data_;
  LabeledDataset linear_data_;
  std::vector<TrainParams> tuned_;
  std::map<std::string, FittedModel> fitted_;
};

}  // namespace

StageSelection StageSelection::all() {
  StageSelection s;
  s.write_dataset = s.train = s.evaluate = s.explain = s.assoc = s.report = true;
  return s;
}

RunManifest run_pipeline(const PipelineConfig& config, const StageSelection& stages) {
  if (config.output_dir.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no output directory (set output_dir or --out)");
  }
  fs::path out = config.output_dir.lexically_normal();
  if (out.filename().empty()) out = out.parent_path();
  Staging staging(out.parent_path() / (out.filename().string() + ".staging"));
  RunManifest result;
  try {
    result.json = Runner(config, stages, staging).run();
    result.files = staging.files();
    write_text_file(staging.dir() / "manifest.json", result.json);
    staging.publish(out, {"manifest.json"});
  } catch (...) {
    staging.discard();
    throw;
  }
  return result;
}

}  // namespace eduml
