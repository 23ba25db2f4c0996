// Command-line front end. Subcommands map onto the pipeline pieces:
//   summarize  stream a file and print the dataset summary
//   train      run the full pipeline from a config file
//   evaluate   score a saved model artifact against a data file
//   predict    per-record predictions from a saved artifact
//   topics     fit the topic model on narratives alone
//   synth      generate a seeded synthetic benchmark file
//   report     re-render a machine report
// Global flags (--config, --seed, --out, --format) apply to every subcommand;
// explicit flags override values from the config file.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finsight/config.hpp"
#include "finsight/error.hpp"
#include "finsight/ingest.hpp"
#include "finsight/pipeline.hpp"
#include "finsight/report.hpp"
#include "finsight/synth.hpp"

namespace {

using finsight::Errc;
using finsight::Error;
using finsight::raise;
namespace app = finsight::app;
namespace ingest = finsight::ingest;
namespace features = finsight::features;
namespace synth = finsight::synth;
using nlohmann::ordered_json;

// 0 success, 1 usage or config, 2 data, 3 internal.
int exit_code_for(Errc code) {
  switch (code) {
    case Errc::bad_config:
    case Errc::bad_ratio:
    case Errc::bad_topic:
      return 1;
    case Errc::io:
    case Errc::header_mismatch:
    case Errc::missing_field:
    case Errc::bad_date:
    case Errc::bad_category:
    case Errc::corrupt:
    case Errc::version_unsupported:
    case Errc::empty_dataset:
    case Errc::empty_corpus:
    case Errc::task_mismatch:
    case Errc::encoder_missing:
    case Errc::not_binary:
    case Errc::one_class_only:
      return 2;
    default:
      return 3;
  }
}

ingest::SourceFormat parse_source_format(const std::string& name) {
  if (name == "csv") return ingest::SourceFormat::csv;
  if (name == "jsonl") return ingest::SourceFormat::json_lines;
  raise(Errc::bad_config, "unknown input format '" + name + "' (expected csv or jsonl)");
}

struct InputOptions {
  std::string input;
  std::string schema;
  std::string format;  // empty = take from config
  bool strict = false;
  bool strict_set = false;

  // Every record-reading subcommand shares these flags.
  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "data file to read");
    cmd->add_option("--schema", schema, "column-mapping JSON (default: stock CFPB headers)");
    cmd->add_option("--input-format", format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_flag_callback(
        "--strict", [this] { strict = strict_set = true; },
        "fail on the first bad row instead of collecting row errors");
  }

  // CLI values override the config; the config fills in whatever is missing.
  ingest::SchemaSpec resolve(const app::PipelineConfig& base, std::string* path_out) const {
    const std::string path = input.empty() ? base.input_path : input;
    if (path.empty()) raise(Errc::bad_config, "no input file given (--input or config)");
    const std::string schema_path = schema.empty() ? base.schema_path : schema;
    const ingest::SourceFormat source_format =
        format.empty() ? base.format : parse_source_format(format);
    ingest::SchemaSpec spec =
        schema_path.empty()
            ? (source_format == ingest::SourceFormat::csv ? ingest::SchemaSpec::cfpb_default()
                                                          : ingest::SchemaSpec::identity())
            : ingest::SchemaSpec::load(schema_path);
    spec.format = source_format;
    spec.strict = strict_set ? strict : base.strict;
    spec.validate();
    *path_out = path;
    return spec;
  }
};

ingest::ReadResult read_records(const InputOptions& options, const app::PipelineConfig& base) {
  std::string path;
  const ingest::SchemaSpec schema = options.resolve(base, &path);
  return ingest::read_file(path, schema);
}

app::ModelArtifact load_artifact(const std::string& path) {
  if (path.empty()) raise(Errc::bad_config, "no model artifact given (--model)");
  return app::load_model(path);
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io, "cannot write " + path);
  out << body;
  if (!out) raise(Errc::io, "short write to " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"consumer complaint analytics: ingest, train, evaluate, topics"};
  cli.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_value = 0;
  std::string out_dir;
  std::string format = "text";
  cli.add_option("--config", config_path, "pipeline config JSON")->configurable(false);
  CLI::Option* seed_opt = cli.add_option("--seed", seed_value, "run seed (overrides config)");
  CLI::Option* out_opt = cli.add_option("--out", out_dir, "output directory (overrides config)");
  cli.add_option("--format", format, "output rendering: text or machine")
      ->check(CLI::IsMember({"text", "machine"}));

  CLI::App* cmd_summarize = cli.add_subcommand("summarize", "streaming dataset summary");
  InputOptions summarize_input;
  summarize_input.attach(cmd_summarize);

  CLI::App* cmd_train = cli.add_subcommand("train", "run the full pipeline");
  InputOptions train_input;
  train_input.attach(cmd_train);
  double ratio_value = 0.7;
  double threshold_value = 0.5;
  CLI::Option* ratio_opt =
      cmd_train->add_option("--ratio", ratio_value, "train fraction of the split");
  CLI::Option* train_threshold_opt = cmd_train->add_option(
      "--threshold", threshold_value, "positive-class probability cutoff (timely task)");

  CLI::App* cmd_evaluate = cli.add_subcommand("evaluate", "score a saved model on a data file");
  InputOptions evaluate_input;
  evaluate_input.attach(cmd_evaluate);
  std::string evaluate_model;
  double evaluate_threshold = 0.5;
  cmd_evaluate->add_option("--model", evaluate_model, "model artifact path")->required();
  CLI::Option* evaluate_threshold_opt = cmd_evaluate->add_option(
      "--threshold", evaluate_threshold, "positive-class probability cutoff");

  CLI::App* cmd_predict = cli.add_subcommand("predict", "per-record predictions, one JSON line each");
  InputOptions predict_input;
  predict_input.attach(cmd_predict);
  std::string predict_model;
  std::string predict_output;
  double predict_threshold = 0.5;
  cmd_predict->add_option("--model", predict_model, "model artifact path")->required();
  cmd_predict->add_option("--output", predict_output, "destination file (default: stdout)");
  CLI::Option* predict_threshold_opt = cmd_predict->add_option(
      "--threshold", predict_threshold, "positive-class probability cutoff");

  CLI::App* cmd_topics = cli.add_subcommand("topics", "fit the topic model on narratives");
  InputOptions topics_input;
  topics_input.attach(cmd_topics);
  int topics_k = 10;
  int topics_sweeps = 200;
  int topics_top_words = 10;
  std::string topics_stopwords;
  CLI::Option* topics_k_opt = cmd_topics->add_option("--topics", topics_k, "topic count");
  CLI::Option* topics_sweeps_opt = cmd_topics->add_option("--sweeps", topics_sweeps, "Gibbs sweeps");
  CLI::Option* topics_top_opt =
      cmd_topics->add_option("--top-words", topics_top_words, "words listed per topic");
  CLI::Option* topics_stop_opt =
      cmd_topics->add_option("--stopwords", topics_stopwords, "stopword file (default: built-in)");

  CLI::App* cmd_synth = cli.add_subcommand("synth", "generate a synthetic benchmark CSV");
  std::string synth_output;
  synth::SynthSpec synth_spec;
  cmd_synth->add_option("--output", synth_output, "destination CSV path")->required();
  cmd_synth->add_option("--rows", synth_spec.rows, "record count");
  cmd_synth->add_option("--companies", synth_spec.companies, "distinct companies");
  cmd_synth->add_option("--products", synth_spec.products, "distinct products");
  cmd_synth->add_option("--issues", synth_spec.issues, "distinct issues");
  cmd_synth->add_option("--states", synth_spec.states, "distinct states");
  cmd_synth->add_option("--signal", synth_spec.signal, "planted signal strength");
  cmd_synth->add_option("--narrative-fraction", synth_spec.narrative_fraction,
                        "fraction of rows with a narrative");
  cmd_synth->add_option("--missing-rate", synth_spec.missing_rate, "missing-field rate");

  CLI::App* cmd_report = cli.add_subcommand("report", "re-render a machine report");
  std::string report_path;
  cmd_report->add_option("--in", report_path, "machine report JSON path")->required();

  for (CLI::App* sub : cli.get_subcommands({})) sub->fallthrough();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const bool machine = format == "machine";
  try {
    app::PipelineConfig base;
    if (!config_path.empty()) base = app::load_config(config_path);
    if (seed_opt->count() > 0) base.seed = seed_value;
    if (out_opt->count() > 0) base.out_dir = out_dir;

    if (cli.got_subcommand(cmd_summarize)) {
      const ingest::ReadResult result = read_records(summarize_input, base);
      if (machine) {
        std::cout << app::summary_to_json(result.summary).dump(2) << "\n";
      } else {
        std::cout << app::render_summary_text(result.summary);
      }
      return 0;
    }

    if (cli.got_subcommand(cmd_train)) {
      if (!train_input.input.empty()) base.input_path = train_input.input;
      if (!train_input.schema.empty()) base.schema_path = train_input.schema;
      if (!train_input.format.empty()) base.format = parse_source_format(train_input.format);
      if (train_input.strict_set) base.strict = train_input.strict;
      if (ratio_opt->count() > 0) base.split_ratio = ratio_value;
      if (train_threshold_opt->count() > 0) base.positive_threshold = threshold_value;
      const app::PipelineResult result = app::run_pipeline(base);
      std::cout << app::render_report(result.report, machine);
      if (!machine) {
        std::cout << "Artifacts:\n";
        for (const std::string& path : result.artifact_paths) std::cout << "  " << path << "\n";
        std::cout << "Report: " << result.text_report_path << ", "
                  << result.machine_report_path << "\n";
      }
      return 0;
    }

    if (cli.got_subcommand(cmd_evaluate)) {
      const app::ModelArtifact artifact = load_artifact(evaluate_model);
      const ingest::ReadResult data = read_records(evaluate_input, base);
      const double threshold = evaluate_threshold_opt->count() > 0 ? evaluate_threshold
                                                                   : base.positive_threshold;
      const app::ModelEvaluation eval =
          app::evaluate_artifact(artifact, data.records, threshold);
      const std::vector<std::string> feature_names =
          features::TaskSpec::for_task(artifact.task).feature_names;
      if (machine) {
        std::cout << app::evaluation_to_json(eval, feature_names).dump(2) << "\n";
      } else {
        std::cout << app::render_evaluation_text(eval, feature_names);
      }
      return 0;
    }

    if (cli.got_subcommand(cmd_predict)) {
      const app::ModelArtifact artifact = load_artifact(predict_model);
      const ingest::ReadResult data = read_records(predict_input, base);
      const double threshold = predict_threshold_opt->count() > 0 ? predict_threshold
                                                                  : base.positive_threshold;
      const std::vector<app::Prediction> predictions =
          app::predict_records(artifact, data.records, threshold);
      std::ostringstream lines;
      for (const app::Prediction& p : predictions) {
        lines << ordered_json{{"complaint_id", p.complaint_id},
                              {"label", p.label},
                              {"label_name", p.label_name},
                              {"probabilities", p.probabilities}}
                     .dump()
              << "\n";
      }
      if (predict_output.empty()) {
        std::cout << lines.str();
      } else {
        try {
          write_text_file(predict_output, lines.str());
        } catch (...) {
          std::error_code ec;
          std::filesystem::remove(predict_output, ec);
          throw;
        }
      }
      return 0;
    }

    if (cli.got_subcommand(cmd_topics)) {
      const ingest::ReadResult data = read_records(topics_input, base);
      app::TopicsStageConfig stage = base.topics;
      if (topics_k_opt->count() > 0) stage.topic_count = topics_k;
      if (topics_sweeps_opt->count() > 0) stage.sweeps = topics_sweeps;
      if (topics_top_opt->count() > 0) stage.top_words = topics_top_words;
      if (topics_stop_opt->count() > 0) stage.stopword_path = topics_stopwords;
      const std::optional<app::TopicsReport> result =
          app::run_topics_stage(data.records, stage, base.seed);
      if (!result) raise(Errc::empty_corpus, "no record carries a narrative");
      if (machine) {
        std::cout << app::topics_to_json(*result).dump(2) << "\n";
      } else {
        std::cout << app::render_topics_text(*result);
      }
      return 0;
    }

    if (cli.got_subcommand(cmd_synth)) {
      if (seed_opt->count() > 0) synth_spec.seed = seed_value;
      synth::generate_synthetic(synth_spec, synth_output);
      if (machine) {
        std::cout << ordered_json{{"rows", synth_spec.rows}, {"path", synth_output}}.dump(2)
                  << "\n";
      } else {
        std::cout << "wrote " << synth_spec.rows << " rows to " << synth_output << "\n";
      }
      return 0;
    }

    if (cli.got_subcommand(cmd_report)) {
      std::ifstream in(report_path, std::ios::binary);
      if (!in) raise(Errc::io, "cannot read " + report_path);
      ordered_json doc;
      try {
        doc = ordered_json::parse(in);
      } catch (const nlohmann::json::exception&) {
        raise(Errc::corrupt, report_path + " is not valid JSON");
      }
      std::cout << app::render_report(app::report_from_json(doc), machine);
      return 0;
    }

    raise(Errc::internal, "no subcommand dispatched");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
