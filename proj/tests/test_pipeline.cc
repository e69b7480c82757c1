#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "eduml/csv.h"
#include "eduml/digest.h"
#include "eduml/error.h"
#include "eduml/model_io.h"
#include "eduml/pipeline.h"
#include "eduml/schema.h"
#include "eduml/synth.h"
#include "eduml/trainers.h"
#include "eduml/tree_export.h"
#include "test_support.h"

using namespace eduml;
namespace fs = std::filesystem;

namespace {

const char* kSchema = R"(
[emis]
kind = integer
role = key
[pass_rate]
kind = numeric
role = score
[Quintile]
kind = categorical
ordinal = true
levels = 1, 2, 3, 4, 5
synth.levels = 1, 2, 3, 4, 5
[RateToilet]
kind = categorical
synth.levels = good, average, poor
[ratio]
kind = numeric
synth.min = 10
synth.max = 50
synth.missing = 0.1
)";

const char* kConfig = R"({
  "seed": 7,
  "inputs": [
    {"name": "schools", "schema": "schools.schema", "path": "schools.csv"},
    {"name": "extra", "schema": "extra.schema", "synth": {"rows": 300}}
  ],
  "steps": [{"op": "merge", "left": "schools", "right": "extra", "key": "emis", "output": "all"}],
  "label": {"score": "pass_rate"},
  "models": [
    {"name": "tree", "family": "tree", "params": {"tree.max_depth": 3}},
    {"name": "boosted", "family": "boosted", "params": {"boost.n_rounds": 15, "boost.max_depth": 2}},
    {"name": "logistic", "family": "logistic"},
    {"name": "majority", "family": "majority"}
  ],
  "cv": {"k": 3, "reps": 2},
  "interpret": {"background_cap": 40, "explain_cap": 100, "tree_export_depth": 2},
  "descriptive": {"quantile": {"column": "pass_rate", "k": 4}}
})";

int exit_code_of(const std::string& command) {
  const int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_fixture(const std::string& name) {
  const fs::path dir = eduml::testing::scratch_dir(name);
  write_text_file(dir / "schools.schema", kSchema);
  write_text_file(dir / "extra.schema", "[emis]\nkind = integer\nrole = key\n[fence]\nkind = categorical\nsynth.levels = yes, no\n");
  const SchemaSpec schema = parse_schema(kSchema);
  const Table t = synth_generate(schema, 300, parse_signal("1.2*Quintile - 0.9*RateToilet[poor] - 3"), 3);
  write_text_file(dir / "schools.csv", table_to_csv(t));
  write_text_file(dir / "config.json", kConfig);
  return dir;
}

std::map<std::string, std::string> digests(const RunManifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& f : m.files) out[f.path] = f.sha256;
  return out;
}

size_t data_lines(const fs::path& path) {
  const std::string text = read_text_file(path);
  return size_t(std::count(text.begin(), text.end(), '\n')) - 1;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an eduml::Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("pipeline runs are byte-identical") {
  const fs::path dir = write_fixture("determinism");
  PipelineConfig config = load_pipeline_config(dir / "config.json");
  config.output_dir = dir / "run1";
  const RunManifest a = run_pipeline(config, StageSelection::all());
  config.output_dir = dir / "run2";
  const RunManifest b = run_pipeline(config, StageSelection::all());
  CHECK(a.json == b.json);
  CHECK(digests(a) == digests(b));
  for (const auto& f : a.files) {
    CHECK(sha256_hex(read_text_file(dir / "run1" / f.path)) == f.sha256);
  }
  CHECK(fs::exists(dir / "run1" / "manifest.json"));
  CHECK_FALSE(fs::exists(dir / "run1.staging"));
}

TEST_CASE("pipeline outputs have the expected shape") {
  const fs::path dir = write_fixture("shape");
  PipelineConfig config = load_pipeline_config(dir / "config.json");
  config.output_dir = dir / "out";
  run_pipeline(config, StageSelection::all());
  const fs::path out = dir / "out";
  CHECK(data_lines(out / "model_performance.csv") == 4);
  const auto lin = std::get<LinearModel>(load_model((out / "models" / "logistic.json").string()));
  CHECK(data_lines(out / "odds_ratios.csv") == lin.coefficients.size());
  CHECK(data_lines(out / "shap_ranking.csv") > 0);
  CHECK(data_lines(out / "shap_beeswarm.csv") == 100 * data_lines(out / "shap_ranking.csv"));
  CHECK(fs::exists(out / "decision_tree.txt"));
  CHECK(fs::exists(out / "associations.csv"));
  CHECK(fs::exists(out / "quantile_bins.csv"));
  CHECK_FALSE(fs::exists(out / "models" / "majority.json"));

  const auto manifest = nlohmann::json::parse(read_text_file(out / "manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest.contains("stages"));
}

TEST_CASE("the bundled demo config produces one odds-ratio row per encoded feature") {
  PipelineConfig config = load_pipeline_config(fs::path(EDUML_SOURCE_DIR) / "configs" /
                                               "sa_synthetic" / "config.json");
  const fs::path out = eduml::testing::scratch_dir("sa_demo") / "out";
  config.output_dir = out;
  const RunManifest m = run_pipeline(config, StageSelection::all());
  const auto perf = parse_csv(read_text_file(out / "model_performance.csv"));
  CHECK(perf.rows.size() == 5);
  const auto lin = std::get<LinearModel>(
      load_model((out / "models" / "logistic_regression.json").string()));
  const auto odds = parse_csv(read_text_file(out / "odds_ratios.csv"));
  REQUIRE(odds.rows.size() == lin.feature_names.size());
  for (size_t i = 0; i < odds.rows.size(); ++i) CHECK(odds.rows[i][0] == lin.feature_names[i]);
}

TEST_CASE("configuration errors") {
  const fs::path dir = write_fixture("config_errors");
  auto parse = [&](const std::string& text) { return parse_pipeline_config(text, dir); };
  CHECK(code_of([&] { parse("{"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([&] { parse(R"({"inputs": []})"); }) == ErrorCode::kInvalidConfig);
  std::string extra = kConfig;
  extra.insert(1, "\"surprise\": 1,");
  CHECK(code_of([&] { parse(extra); }) == ErrorCode::kInvalidConfig);
  std::string bad_param = kConfig;
  bad_param.replace(bad_param.find("tree.max_depth"), 14, "tree.max_dept");
  CHECK(code_of([&] { parse(bad_param); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("a missing input file fails in the ingest stage") {
  const fs::path dir = write_fixture("missing_input");
  fs::remove(dir / "schools.csv");
  PipelineConfig config = load_pipeline_config(dir / "config.json");
  config.output_dir = dir / "out";
  try {
    run_pipeline(config, StageSelection::all());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
    CHECK(std::string(e.what()).find("[ingest") != std::string::npos);
    CHECK(e.category() == ErrorCategory::kData);
  }
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("tree export") {
  const auto d = eduml::testing::make_dataset(
      {{0}, {1}, {2}, {3}, {4}, {5}}, {kFail, kFail, kFail, kPass, kPass, kPass}, {"Quintile"});
  TrainParams p;
  p.tree.min_samples_leaf = 1;
  const auto stump = fit_tree(d, p, 1);
  const std::string text = export_tree_text(stump, 3);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("gini=0.000") != std::string::npos);
  CHECK(text.rfind("[0] Quintile < 2.5", 0) == 0);
  CHECK(text.find("class=pass") != std::string::npos);

  const auto deeper = fit_tree(eduml::testing::random_dataset(300, 4, 5), p, 1);
  const std::string root_only = export_tree_text(deeper, 0);
  CHECK(std::count(root_only.begin(), root_only.end(), '\n') == 1);
  CHECK(root_only.find("nodes below not shown") != std::string::npos);
  CHECK(export_tree_dot(stump, 3).rfind("digraph", 0) == 0);

  TreeEnsemble two = stump;
  two.trees.push_back(stump.trees[0]);
  CHECK(code_of([&] { export_tree_text(two, 3); }) == ErrorCode::kNotASingleTree);
}

TEST_CASE("command-line exit codes") {
  const std::string cli = EDUML_CLI_PATH;
  const fs::path dir = write_fixture("cli");
  const std::string cfg = (dir / "config.json").string();
  CHECK(exit_code_of(cli + " run --config " + cfg + " --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(exit_code_of(cli + " train --config " + cfg + " --out " + (dir / "t").string() +
                     " --seed 99") == 0);
  CHECK(exit_code_of(cli + " run --config " + (dir / "nope.json").string()) == 2);
  CHECK(exit_code_of(cli + " frobnicate") == 2);
  fs::remove(dir / "schools.csv");
  CHECK(exit_code_of(cli + " run --config " + cfg + " --out " + (dir / "out2").string()) == 3);
  CHECK(exit_code_of(cli + " synth --schema " + (dir / "schools.schema").string() +
                     " --rows 20 --seed 1 --out " + (dir / "s.csv").string()) == 0);
  CHECK(parse_csv(read_text_file(dir / "s.csv")).rows.size() == 20);
}
