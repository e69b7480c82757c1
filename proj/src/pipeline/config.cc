#include <algorithm>
#include <json.hpp>
#include <set>

#include "eduml/csv.h"
#include "eduml/digest.h"
#include "eduml/error.h"
#include "eduml/pipeline.h"
#include "eduml/synth.h"

namespace eduml {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, where + ": " + what);
}

void allow_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
      bad(where, "unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    bad(where, std::string("'") + key + "' has the wrong type");
  }
}

template <typename T>
T require(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where, std::string("missing '") + key + "'");
  return get_or<T>(j, key, T{}, where);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

AggregateSpec parse_aggregate(const Json& j, const std::string& where) {
  allow_keys(j, where, {"kind", "column", "level", "output"});
  const auto kind = require<std::string>(j, "kind", where);
  const auto output = get_or<std::string>(j, "output", "", where);
  if (kind == "count") return AggregateSpec::count(output.empty() ? "count" : output);
  if (kind == "count_where") {
    return AggregateSpec::count_where(require<std::string>(j, "column", where),
                                      require<std::string>(j, "level", where), output);
  }
  if (kind == "mean") return AggregateSpec::mean(require<std::string>(j, "column", where), output);
  bad(where, "unknown aggregate kind '" + kind + "'");
}

StepSpec parse_step(const Json& j, size_t index) {
  const std::string where = "steps[" + std::to_string(index) + "]";
  if (!j.is_object()) bad(where, "expected an object");
  const auto op = require<std::string>(j, "op", where);
  StepSpec s;
  if (op == "merge") {
    allow_keys(j, where, {"op", "left", "right", "key", "right_key", "cardinality", "output"});
    s.op = StepSpec::Op::kMerge;
    s.input = require<std::string>(j, "left", where);
    s.right = require<std::string>(j, "right", where);
    s.key = require<std::string>(j, "key", where);
    s.right_key = get_or<std::string>(j, "right_key", "", where);
    const auto card = get_or<std::string>(j, "cardinality", "one_to_one", where);
    if (card == "one_to_one") {
      s.cardinality = JoinCardinality::kOneToOne;
    } else if (card == "many_to_one") {
      s.cardinality = JoinCardinality::kManyToOne;
    } else {
      bad(where, "cardinality must be one_to_one or many_to_one");
    }
  } else if (op == "mode_aggregate") {
    allow_keys(j, where, {"op", "input", "group", "values", "output"});
    s.op = StepSpec::Op::kModeAggregate;
    s.input = require<std::string>(j, "input", where);
    s.group = require<std::string>(j, "group", where);
    s.values = require<std::vector<std::string>>(j, "values", where);
  } else if (op == "count_aggregate") {
    allow_keys(j, where, {"op", "input", "key", "aggregates", "keys_from", "output"});
    s.op = StepSpec::Op::kCountAggregate;
    s.input = require<std::string>(j, "input", where);
    s.key = require<std::string>(j, "key", where);
    s.keys_from = get_or<std::string>(j, "keys_from", "", where);
    if (!j.contains("aggregates") || !j["aggregates"].is_array()) {
      bad(where, "'aggregates' must be a list");
    }
    for (size_t i = 0; i < j["aggregates"].size(); ++i) {
      s.aggregates.push_back(parse_aggregate(j["aggregates"][i],
                                             where + ".aggregates[" + std::to_string(i) + "]"));
    }
  } else if (op == "ratio") {
    allow_keys(j, where, {"op", "input", "numerator", "denominator", "name", "output"});
    s.op = StepSpec::Op::kRatio;
    s.input = require<std::string>(j, "input", where);
    s.numerator = require<std::string>(j, "numerator", where);
    s.denominator = require<std::string>(j, "denominator", where);
    s.name = require<std::string>(j, "name", where);
  } else if (op == "drop_sparse") {
    allow_keys(j, where, {"op", "input", "max_missing_fraction", "keep", "output"});
    s.op = StepSpec::Op::kDropSparse;
    s.input = require<std::string>(j, "input", where);
    s.max_missing_fraction = get_or<double>(j, "max_missing_fraction", 0.5, where);
    if (!(s.max_missing_fraction >= 0.0 && s.max_missing_fraction <= 1.0)) {
      bad(where, "max_missing_fraction must be in [0, 1]");
    }
    s.keep = get_or<std::vector<std::string>>(j, "keep", {}, where);
  } else {
    bad(where, "unknown op '" + op + "'");
  }
  s.output = get_or<std::string>(j, "output", s.input, where);
  return s;
}

ModelConfig parse_model(const Json& j, size_t index) {
  const std::string where = "models[" + std::to_string(index) + "]";
  allow_keys(j, where, {"name", "family", "params", "grid"});
  ModelConfig m;
  m.spec.family = parse_model_family(require<std::string>(j, "family", where));
  m.spec.name = get_or<std::string>(j, "name", model_family_name(m.spec.family), where);
  if (j.contains("params")) {
    if (!j["params"].is_object()) bad(where, "'params' must be an object");
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
      if (it.value().is_boolean()) {
        m.spec.params.set(it.key(), it.value().get<bool>() ? 1.0 : 0.0);
      } else if (it.value().is_number()) {
        m.spec.params.set(it.key(), it.value().get<double>());
      } else {
        bad(where, "parameter '" + it.key() + "' must be a number");
      }
    }
  }
  m.spec.params.validate();
  if (j.contains("grid")) {
    if (!j["grid"].is_object()) bad(where, "'grid' must be an object");
    for (auto it = j["grid"].begin(); it != j["grid"].end(); ++it) {
      TrainParams probe;
      probe.get(it.key());
      if (!it.value().is_array()) bad(where, "grid values for '" + it.key() + "' must be a list");
      m.grid.emplace_back(it.key(), it.value().get<std::vector<double>>());
    }
    if (expand_grid(m.grid).empty()) bad(where, "empty grid");
  }
  return m;
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(j, "config", {"seed", "output_dir", "inputs", "steps", "dataset", "label", "models",
                           "cv", "interpret", "stats", "descriptive"});
  PipelineConfig c;
  c.base_dir = base_dir;
  c.config_sha256 = sha256_hex(json_text);
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    bad("config", "'seed' must be a non-negative integer");
  }
  c.seed = j["seed"].get<uint64_t>();
  if (j.contains("output_dir")) {
    c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "", "config"));
  }

  if (!j.contains("inputs") || !j["inputs"].is_array() || j["inputs"].empty()) {
    bad("config", "'inputs' must be a nonempty list");
  }
  std::set<std::string> tables;
  for (size_t i = 0; i < j["inputs"].size(); ++i) {
    const Json& in = j["inputs"][i];
    const std::string where = "inputs[" + std::to_string(i) + "]";
    allow_keys(in, where, {"name", "path", "schema", "synth"});
    InputSpec spec;
    spec.name = require<std::string>(in, "name", where);
    spec.schema_path = resolve(base_dir, require<std::string>(in, "schema", where));
    if (in.contains("synth")) {
      const Json& s = in["synth"];
      allow_keys(s, where + ".synth", {"rows", "signal"});
      spec.synth_rows = require<size_t>(s, "rows", where + ".synth");
      spec.synth_signal = get_or<std::string>(s, "signal", "0", where + ".synth");
      parse_signal(spec.synth_signal);
    } else {
      spec.path = resolve(base_dir, require<std::string>(in, "path", where));
    }
    try {
      spec.schema = read_schema(spec.schema_path);
    } catch (const Error& e) {
      throw e.with_context(where);
    }
    if (!tables.insert(spec.name).second) bad(where, "duplicate input name '" + spec.name + "'");
    c.inputs.push_back(std::move(spec));
  }

  if (j.contains("steps")) {
    if (!j["steps"].is_array()) bad("config", "'steps' must be a list");
    for (size_t i = 0; i < j["steps"].size(); ++i) {
      StepSpec s = parse_step(j["steps"][i], i);
      const std::string where = "steps[" + std::to_string(i) + "]";
      for (const std::string* t : {&s.input, &s.right, &s.keys_from}) {
        if (!t->empty() && !tables.count(*t)) bad(where, "unknown table '" + *t + "'");
      }
      tables.insert(s.output);
      c.steps.push_back(std::move(s));
    }
  }

  c.dataset = get_or<std::string>(j, "dataset", c.steps.empty() ? c.inputs[0].name
                                                                 : c.steps.back().output,
                                  "config");
  if (!tables.count(c.dataset)) bad("config", "unknown dataset table '" + c.dataset + "'");

  if (!j.contains("label")) bad("config", "missing 'label'");
  {
    const Json& l = j["label"];
    allow_keys(l, "label", {"score", "threshold", "pass_iff_geq"});
    c.score = require<std::string>(l, "score", "label");
    c.label.threshold = get_or<double>(l, "threshold", 50.0, "label");
    c.label.pass_iff_geq = get_or<bool>(l, "pass_iff_geq", true, "label");
    if (!(c.label.threshold >= 0.0 && c.label.threshold <= 100.0)) {
      bad("label", "threshold must be in [0, 100]");
    }
    const bool declared = std::any_of(c.inputs.begin(), c.inputs.end(), [&](const InputSpec& in) {
      const ColumnSpec* s = in.schema.find(c.score);
      return s != nullptr && s->role == ColumnRole::kScore;
    });
    if (!declared) bad("label", "score column '" + c.score + "' is not declared with role score");
  }

  if (!j.contains("models") || !j["models"].is_array() || j["models"].empty()) {
    bad("config", "'models' must be a nonempty list");
  }
  std::set<std::string> model_names;
  for (size_t i = 0; i < j["models"].size(); ++i) {
    ModelConfig m = parse_model(j["models"][i], i);
    if (!model_names.insert(m.spec.name).second) {
      bad("models", "duplicate model name '" + m.spec.name + "'");
    }
    c.models.push_back(std::move(m));
  }

  if (j.contains("cv")) {
    const Json& v = j["cv"];
    allow_keys(v, "cv", {"k", "reps", "balance", "threshold", "grid_reps"});
    c.cv.k = get_or<size_t>(v, "k", 10, "cv");
    c.cv.reps = get_or<size_t>(v, "reps", 10, "cv");
    c.cv.balance = get_or<bool>(v, "balance", true, "cv");
    c.cv.threshold = get_or<double>(v, "threshold", 0.5, "cv");
    c.grid_reps = get_or<size_t>(v, "grid_reps", 1, "cv");
    if (c.cv.k < 2) bad("cv", "k must be >= 2");
    if (c.cv.reps < 1 || c.grid_reps < 1) bad("cv", "reps must be >= 1");
    if (!(c.cv.threshold >= 0.0 && c.cv.threshold <= 1.0)) bad("cv", "threshold must be in [0, 1]");
  }

  auto find_model = [&](const std::string& name) -> const ModelConfig* {
    for (const ModelConfig& m : c.models) {
      if (m.spec.name == name) return &m;
    }
    return nullptr;
  };
  if (j.contains("interpret")) {
    const Json& v = j["interpret"];
    allow_keys(v, "interpret", {"background_cap", "explain_cap", "shap_model", "linear_model",
                                "tree_export_depth"});
    c.background_cap = get_or<size_t>(v, "background_cap", 500, "interpret");
    c.explain_cap = get_or<size_t>(v, "explain_cap", 0, "interpret");
    c.shap_model = get_or<std::string>(v, "shap_model", "", "interpret");
    c.linear_model = get_or<std::string>(v, "linear_model", "", "interpret");
    c.tree_export_depth = get_or<int>(v, "tree_export_depth", 3, "interpret");
    if (c.background_cap < 1) bad("interpret", "background_cap must be >= 1");
    if (c.tree_export_depth < 0) bad("interpret", "tree_export_depth must be >= 0");
  }
  for (const ModelConfig& m : c.models) {
    const ModelFamily f = m.spec.family;
    if (c.shap_model.empty() && f == ModelFamily::kBoosted) c.shap_model = m.spec.name;
    if (c.linear_model.empty() && f == ModelFamily::kLogistic) c.linear_model = m.spec.name;
  }
  if (!c.shap_model.empty()) {
    const ModelConfig* m = find_model(c.shap_model);
    if (m == nullptr) bad("interpret", "unknown shap_model '" + c.shap_model + "'");
    const ModelFamily f = m->spec.family;
    if (f != ModelFamily::kTree && f != ModelFamily::kForest && f != ModelFamily::kBoosted) {
      bad("interpret", "shap_model must be a tree model");
    }
  }
  if (!c.linear_model.empty()) {
    const ModelConfig* m = find_model(c.linear_model);
    if (m == nullptr || m->spec.family != ModelFamily::kLogistic) {
      bad("interpret", "linear_model must name a logistic model");
    }
  }

  if (j.contains("stats")) {
    allow_keys(j["stats"], "stats", {"variables"});
    c.assoc_variables = get_or<std::vector<std::string>>(j["stats"], "variables", {}, "stats");
  }
  if (j.contains("descriptive")) {
    const Json& v = j["descriptive"];
    allow_keys(v, "descriptive", {"group", "frequency", "summary", "quantile", "histograms"});
    c.summary_group = get_or<std::string>(v, "group", kOutcomeColumn, "descriptive");
    c.frequency_columns = get_or<std::vector<std::string>>(v, "frequency", {}, "descriptive");
    c.summary_columns = get_or<std::vector<std::string>>(v, "summary", {}, "descriptive");
    if (v.contains("quantile")) {
      allow_keys(v["quantile"], "descriptive.quantile", {"column", "k"});
      c.quantile_column = require<std::string>(v["quantile"], "column", "descriptive.quantile");
      c.quantile_k = get_or<int>(v["quantile"], "k", 4, "descriptive.quantile");
      if (c.quantile_k < 2) bad("descriptive.quantile", "k must be >= 2");
    }
    if (v.contains("histograms")) {
      if (!v["histograms"].is_array()) bad("descriptive", "'histograms' must be a list");
      for (const Json& h : v["histograms"]) {
        allow_keys(h, "descriptive.histograms", {"column", "bins"});
        HistogramConfig hc;
        hc.column = require<std::string>(h, "column", "descriptive.histograms");
        hc.bins = get_or<size_t>(h, "bins", 20, "descriptive.histograms");
        if (hc.bins < 1) bad("descriptive.histograms", "bins must be >= 1");
        c.histograms.push_back(hc);
      }
    }
  }
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  std::filesystem::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_pipeline_config(text, base);
}

}  // namespace eduml
