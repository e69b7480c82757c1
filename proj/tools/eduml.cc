// Command-line front end for the eduml pipeline.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "eduml/csv.h"
#include "eduml/error.h"
#include "eduml/pipeline.h"
#include "eduml/schema.h"
#include "eduml/synth.h"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  std::optional<double> threshold;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Pipeline configuration (JSON)")->required();
  cmd->add_option("--out", opts.out, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", opts.seed, "Master seed (overrides the config)");
  cmd->add_option("--threshold", opts.threshold, "Decision threshold on P(fail)")
      ->check(CLI::Range(0.0, 1.0));
}

int run_stages(const CommonOptions& opts, const eduml::StageSelection& stages) {
  eduml::PipelineConfig config = eduml::load_pipeline_config(opts.config);
  if (!opts.out.empty()) config.output_dir = opts.out;
  if (opts.seed) config.seed = *opts.seed;
  if (opts.threshold) config.cv.threshold = *opts.threshold;
  const eduml::RunManifest manifest = eduml::run_pipeline(config, stages);
  for (const eduml::ProducedFile& f : manifest.files) {
    std::cout << f.sha256 << "  " << f.path << "\n";
  }
  std::cout << "wrote " << manifest.files.size() + 1 << " files to "
            << config.output_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"School outcome analytics: ingest, model, explain and report"};
  app.require_subcommand(1);

  CommonOptions opts;
  struct Command {
    const char* name;
    const char* help;
    eduml::StageSelection stages;
  };
  eduml::StageSelection ingest;
  ingest.write_dataset = true;
  eduml::StageSelection train;
  train.train = true;
  eduml::StageSelection evaluate;
  evaluate.evaluate = true;
  eduml::StageSelection explain;
  explain.explain = true;
  eduml::StageSelection assoc;
  assoc.assoc = true;
  eduml::StageSelection report;
  report.report = true;
  const std::vector<Command> commands = {
      {"ingest", "Read, merge and label the inputs; write dataset.csv", ingest},
      {"train", "Fit every configured model on the full dataset", train},
      {"evaluate", "Repeated stratified cross-validation and grid search", evaluate},
      {"explain", "SHAP rankings, odds ratios and the decision-tree export", explain},
      {"assoc", "Association tests against the outcome", assoc},
      {"report", "Frequency tables, group summaries, quantile bins, histograms", report},
      {"run", "All stages", eduml::StageSelection::all()},
  };
  const eduml::StageSelection* selected = nullptr;
  for (const Command& c : commands) {
    CLI::App* cmd = app.add_subcommand(c.name, c.help);
    add_common(cmd, opts);
    cmd->callback([&selected, &c] { selected = &c.stages; });
  }

  std::string schema_path;
  std::string synth_out;
  size_t rows = 1000;
  std::string signal = "0";
  uint64_t synth_seed = 0;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic table from a schema");
  synth->add_option("--schema", schema_path, "Schema file")->required();
  synth->add_option("--rows", rows, "Number of rows");
  synth->add_option("--signal", signal, "Planted log-odds of passing, e.g. \"2*Quintile - 6\"");
  synth->add_option("--seed", synth_seed, "Seed");
  synth->add_option("--out", synth_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : eduml::exit_status(eduml::ErrorCategory::kConfig);
  }

  try {
    if (synth->parsed()) {
      const eduml::SchemaSpec schema = eduml::read_schema(schema_path);
      const eduml::Table table =
          eduml::synth_generate(schema, rows, eduml::parse_signal(signal), synth_seed);
      eduml::write_text_file(synth_out, eduml::table_to_csv(table));
      std::cout << "wrote " << table.n_rows() << " rows to " << synth_out << "\n";
      return 0;
    }
    return run_stages(opts, *selected);
  } catch (const eduml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return eduml::exit_status(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return eduml::exit_status(eduml::ErrorCategory::kData);
  }
}
