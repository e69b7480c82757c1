#include <pybind11/numpy.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eduml/association.h"
#include "eduml/cross_validation.h"
#include "eduml/csv.h"
#include "eduml/error.h"
#include "eduml/importance.h"
#include "eduml/metrics.h"
#include "eduml/model_io.h"
#include "eduml/pipeline.h"
#include "eduml/shap.h"
#include "eduml/special_functions.h"
#include "eduml/synth.h"

namespace py = pybind11;
using namespace eduml;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

std::vector<std::string> default_names(size_t f) {
  std::vector<std::string> names;
  for (size_t j = 0; j < f; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

LabeledDataset to_dataset(const Matrix& x, std::optional<Labels> y,
                          std::optional<std::vector<std::string>> names) {
  if (x.ndim() != 2) throw Error(ErrorCode::kInvalidParameter, "X must be two-dimensional");
  LabeledDataset d;
  d.n_rows = size_t(x.shape(0));
  d.n_features = size_t(x.shape(1));
  d.features.assign(x.data(), x.data() + x.size());
  if (y) {
    if (size_t(y->size()) != d.n_rows) {
      throw Error(ErrorCode::kInvalidParameter, "y must have one label per row of X");
    }
    d.labels.assign(y->data(), y->data() + y->size());
    for (uint8_t v : d.labels) {
      if (v != kFail && v != kPass) {
        throw Error(ErrorCode::kInvalidParameter, "labels must be 0 (pass) or 1 (fail)");
      }
    }
  } else {
    d.labels.assign(d.n_rows, kPass);
  }
  d.feature_names = names ? *names : default_names(d.n_features);
  if (d.feature_names.size() != d.n_features) {
    throw Error(ErrorCode::kFeatureMismatch, "feature_names must match the columns of X");
  }
  return d;
}

TrainParams to_params(const std::map<std::string, double>& values) {
  TrainParams p;
  for (const auto& [name, v] : values) p.set(name, v);
  p.validate();
  return p;
}

py::dict association_dict(const AssociationResult& r) {
  py::dict out;
  out["test"] = r.test;
  out["statistic"] = r.statistic;
  out["df"] = r.df;
  out["df2"] = r.df2;
  out["p_value"] = r.p_value;
  out["sample_sizes"] = r.sample_sizes;
  if (r.test == "gk_gamma") {
    out["concordant"] = r.concordant;
    out["discordant"] = r.discordant;
  }
  return out;
}

py::dict summary_dict(const MetricSummary& s) {
  py::dict out;
  out["mean"] = s.mean;
  out["sd"] = s.sd;
  out["min"] = s.min;
  out["max"] = s.max;
  out["n"] = s.n;
  return out;
}

std::vector<py::tuple> odds_rows(const std::vector<OddsRatioRow>& rows) {
  std::vector<py::tuple> out;
  for (const auto& r : rows) {
    out.push_back(py::make_tuple(r.feature, r.weight, r.odds_ratio, r.pct_change));
  }
  return out;
}

class Model {
 public:
  Model(FittedModel model, std::vector<std::string> names)
      : model_(std::move(model)), names_(std::move(names)) {}

  static Model fit(const std::string& family, const Matrix& x, const Labels& y,
                   std::optional<std::vector<std::string>> names,
                   const std::map<std::string, double>& params, uint64_t seed) {
    const LabeledDataset d = to_dataset(x, y, names);
    ModelSpec spec{family, parse_model_family(family), to_params(params)};
    return Model(fit_model(spec, d, seed), d.feature_names);
  }

  static Model from_json(const std::string& text) {
    AnyModel any = model_from_json(text);
    if (auto* t = std::get_if<TreeEnsemble>(&any)) return Model(*t, t->feature_names);
    const auto& lin = std::get<LinearModel>(any);
    return Model(lin, lin.feature_names);
  }

  py::array_t<double> predict_pass(const Matrix& x) const {
    const auto p = eduml::predict_pass(model_, to_dataset(x, std::nullopt, names_));
    return py::array_t<double>(py::ssize_t(p.size()), p.data());
  }

  std::string kind() const {
    if (std::holds_alternative<LinearModel>(model_)) return "linear";
    if (std::holds_alternative<ConstantModel>(model_)) return "constant";
    return "trees";
  }

  std::string to_json() const {
    if (auto* t = std::get_if<TreeEnsemble>(&model_)) return model_to_json(*t);
    if (auto* l = std::get_if<LinearModel>(&model_)) return model_to_json(*l);
    throw Error(ErrorCode::kInvalidParameter, "the majority baseline has no model file");
  }

  py::tuple shap(const Matrix& x, const Matrix& background) const {
    const TreeShapExplainer explainer(trees(), to_dataset(background, std::nullopt, names_));
    const AttributionMatrix a = explainer.explain_all(to_dataset(x, std::nullopt, names_));
    py::array_t<double> values({py::ssize_t(a.n_rows), py::ssize_t(a.n_features)});
    std::copy(a.values.begin(), a.values.end(), values.mutable_data());
    return py::make_tuple(a.base_value, values);
  }

  py::tuple shap_exact(const Matrix& row, const Matrix& background) const {
    const LabeledDataset r = to_dataset(row, std::nullopt, names_);
    const RowAttribution a =
        shap_oracle(trees(), r.row(0), to_dataset(background, std::nullopt, names_));
    return py::make_tuple(a.base_value, a.values);
  }

  py::array_t<double> margin(const Matrix& x) const {
    const LabeledDataset d = to_dataset(x, std::nullopt, names_);
    std::vector<double> out(d.n_rows);
    for (size_t r = 0; r < d.n_rows; ++r) {
      if (auto* t = std::get_if<TreeEnsemble>(&model_)) {
        out[r] = t->margin(d.row(r));
      } else if (auto* l = std::get_if<LinearModel>(&model_)) {
        out[r] = l->margin(d.row(r));
      } else {
        throw Error(ErrorCode::kInvalidParameter, "the majority baseline has no margin");
      }
    }
    return py::array_t<double>(py::ssize_t(out.size()), out.data());
  }

  std::vector<py::tuple> odds_ratios() const {
    const auto* l = std::get_if<LinearModel>(&model_);
    if (!l) throw Error(ErrorCode::kInvalidParameter, "odds ratios need a logistic model");
    return odds_rows(odds_ratio_table(*l));
  }

  const std::vector<std::string>& feature_names() const { return names_; }

 private:
  const TreeEnsemble& trees() const {
    const auto* t = std::get_if<TreeEnsemble>(&model_);
    if (!t) throw Error(ErrorCode::kInvalidParameter, "SHAP values need a tree model");
    return *t;
  }

  FittedModel model_;
  std::vector<std::string> names_;
};

Distribution parse_distribution(const std::string& name) {
  if (name == "normal") return Distribution::kNormal;
  if (name == "chi2" || name == "chi_square") return Distribution::kChiSquare;
  if (name == "f") return Distribution::kF;
  throw Error(ErrorCode::kInvalidParameter, "unknown distribution '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_eduml, m) {
  m.doc() = "Tabular models, attributions and statistics for school outcome data";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&] { return py::exception<Error>(m, "EdumlError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = error_type.get_stored();
      py::object exc = type(e.what());
      exc.attr("code") = py::str(error_code_name(e.code()));
      exc.attr("exit_status") = py::int_(exit_status(e.category()));
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  m.attr("FAIL") = kFail;
  m.attr("PASS") = kPass;

  py::class_<Model>(m, "Model")
      .def_static("fit", &Model::fit, py::arg("family"), py::arg("X"), py::arg("y"),
                  py::arg("feature_names") = std::nullopt,
                  py::arg("params") = std::map<std::string, double>{}, py::arg("seed") = 0)
      .def_static("from_json", &Model::from_json)
      .def("predict_pass", &Model::predict_pass, py::arg("X"))
      .def("margin", &Model::margin, py::arg("X"))
      .def("shap", &Model::shap, py::arg("X"), py::arg("background"))
      .def("shap_exact", &Model::shap_exact, py::arg("row"), py::arg("background"))
      .def("odds_ratios", &Model::odds_ratios)
      .def("to_json", &Model::to_json)
      .def_property_readonly("kind", &Model::kind)
      .def_property_readonly("feature_names", &Model::feature_names);

  m.def("odds_ratio_table",
        [](const std::vector<std::pair<std::string, double>>& weights) {
          return odds_rows(odds_ratio_table(weights));
        },
        py::arg("weights"));

  m.def("gk_gamma",
        [](const std::vector<std::vector<int64_t>>& table) {
          return association_dict(gk_gamma(ContingencyTable(table)));
        },
        py::arg("table"));
  m.def("kruskal_wallis",
        [](const std::vector<std::vector<double>>& groups, bool exact) {
          return association_dict(kruskal_wallis(groups, exact));
        },
        py::arg("groups"), py::arg("exact") = false);
  m.def("anova_oneway",
        [](const std::vector<std::vector<double>>& groups) {
          return association_dict(anova_oneway(groups));
        },
        py::arg("groups"));
  m.def("tail_probability",
        [](const std::string& dist, double x, double df1, double df2) {
          return tail_probability({parse_distribution(dist), df1, df2}, x);
        },
        py::arg("dist"), py::arg("x"), py::arg("df1") = 1.0, py::arg("df2") = 1.0);

  m.def("roc_auc",
        [](const Labels& y, const Matrix& scores) {
          return roc_auc(std::span<const uint8_t>(y.data(), size_t(y.size())),
                         std::span<const double>(scores.data(), size_t(scores.size())));
        },
        py::arg("labels"), py::arg("scores"));
  m.def("confusion_metrics",
        [](const Labels& y, const Matrix& p_fail, double threshold) {
          const auto c = confusion_metrics(
              std::span<const uint8_t>(y.data(), size_t(y.size())),
              std::span<const double>(p_fail.data(), size_t(p_fail.size())), threshold);
          py::dict out;
          out["accuracy"] = c.accuracy;
          out["sensitivity"] = c.sensitivity;
          out["specificity"] = c.specificity;
          return out;
        },
        py::arg("labels"), py::arg("p_fail"), py::arg("threshold") = 0.5);
  m.def("stratified_kfold",
        [](const Labels& y, size_t k, uint64_t seed) {
          const auto plan =
              stratified_kfold(std::span<const uint8_t>(y.data(), size_t(y.size())), k, seed);
          return py::array_t<uint32_t>(py::ssize_t(plan.assignments.size()),
                                       plan.assignments.data());
        },
        py::arg("labels"), py::arg("k"), py::arg("seed") = 0);
  m.def("cross_validate",
        [](const std::string& family, const Matrix& x, const Labels& y,
           std::optional<std::vector<std::string>> names,
           const std::map<std::string, double>& params, size_t k, size_t reps, uint64_t seed,
           bool balance) {
          const LabeledDataset d = to_dataset(x, y, names);
          ModelSpec spec{family, parse_model_family(family), to_params(params)};
          CvOptions opt;
          opt.k = k;
          opt.reps = reps;
          opt.seed = seed;
          opt.balance = balance;
          const EvalReport r = cross_validate(d, spec, opt);
          py::dict out;
          out["accuracy"] = summary_dict(r.accuracy);
          out["sensitivity"] = summary_dict(r.sensitivity);
          out["specificity"] = summary_dict(r.specificity);
          out["auc"] = summary_dict(r.auc);
          out["n_folds"] = r.folds.size();
          return out;
        },
        py::arg("family"), py::arg("X"), py::arg("y"), py::arg("feature_names") = std::nullopt,
        py::arg("params") = std::map<std::string, double>{}, py::arg("k") = 10,
        py::arg("reps") = 10, py::arg("seed") = 0, py::arg("balance") = true);

  m.def("synth_csv",
        [](const std::string& schema_text, size_t rows, const std::string& signal,
           uint64_t seed) {
          return table_to_csv(synth_generate(parse_schema(schema_text), rows,
                                             parse_signal(signal), seed));
        },
        py::arg("schema"), py::arg("rows"), py::arg("signal") = "", py::arg("seed") = 0);

  m.def("run_pipeline",
        [](const std::filesystem::path& config_path, std::optional<std::filesystem::path> out,
           std::optional<uint64_t> seed) {
          PipelineConfig config = load_pipeline_config(config_path);
          if (out) config.output_dir = *out;
          if (seed) config.seed = *seed;
          RunManifest manifest;
          {
            py::gil_scoped_release release;
            manifest = run_pipeline(config, StageSelection::all());
          }
          py::dict files;
          for (const auto& f : manifest.files) files[py::str(f.path)] = f.sha256;
          return py::make_tuple(manifest.json, files);
        },
        py::arg("config"), py::arg("out") = std::nullopt, py::arg("seed") = std::nullopt);
}
