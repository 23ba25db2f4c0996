#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsight/artifact.hpp"
#include "finsight/config.hpp"
#include "finsight/error.hpp"
#include "finsight/pipeline.hpp"
#include "finsight/report.hpp"
#include "finsight/rng.hpp"
#include "finsight/synth.hpp"

using namespace finsight;
using namespace finsight::app;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Fresh per-case scratch directory under the build tree's temp area.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "finsight_test_app" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << text;
}

features::EncodedDataset random_dataset(int n, int d, int classes, std::uint64_t seed) {
  Rng rng(seed);
  features::EncodedDataset ds;
  ds.matrix = Eigen::MatrixXd(n, d);
  ds.labels = Eigen::VectorXi(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ds.matrix(i, j) = uniform_unit(rng);
    ds.labels[i] = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(classes)));
  }
  for (int c = 0; c < classes; ++c) ds.labels[c] = c;  // every class present
  ds.class_names.resize(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) ds.class_names[static_cast<std::size_t>(c)] = "c" + std::to_string(c);
  return ds;
}

Eigen::MatrixXd random_probes(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd probes(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) probes(i, j) = uniform_unit(rng) * 2.0 - 0.5;
  return probes;
}

PipelineConfig small_pipeline_config(const fs::path& input, const fs::path& out) {
  PipelineConfig config;
  config.input_path = input.string();
  config.seed = 5;
  config.out_dir = out.string();
  config.train.rf.n_trees = 15;
  config.train.gbt.n_rounds = 25;
  config.train.gbt.max_depth = 3;
  config.train.lr.epochs = 60;
  config.train.svm.epochs = 5;
  config.topics.topic_count = 4;
  config.topics.sweeps = 40;
  config.topics.min_df = 2;
  config.topics.top_words = 5;
  return config;
}

}  // namespace

TEST_CASE("example config loads, validates and round trips through json") {
  const PipelineConfig config =
      load_config(std::string(FINSIGHT_SOURCE_DIR) + "/data/example_config.json");
  CHECK_NOTHROW(config.validate());
  CHECK(config.seed == 42);
  CHECK(config.split_ratio == doctest::Approx(0.7));
  CHECK(config.timely.models == std::vector<std::string>{"gbt", "lr", "svm"});
  CHECK(config.response.models == std::vector<std::string>{"rf", "dt"});
  CHECK(config.timely.resampling.policy == features::ResamplePolicy::oversample);

  const ordered_json doc = to_json(config);
  const PipelineConfig back = config_from_json(doc);
  CHECK(to_json(back).dump() == doc.dump());
}

TEST_CASE("config rejects unknown keys and malformed stages") {
  ordered_json doc = to_json(PipelineConfig{});
  doc["inputt"] = "typo.csv";
  try {
    config_from_json(doc);
    FAIL("expected a raise");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }

  PipelineConfig bad_model;
  bad_model.input_path = "in.csv";
  bad_model.timely.models = {"xgboost"};
  CHECK_THROWS_AS(bad_model.validate(), Error);

  // Multiclass task cannot take a binary-only learner.
  PipelineConfig binary_only;
  binary_only.input_path = "in.csv";
  binary_only.response.models = {"gbt"};
  try {
    binary_only.validate();
    FAIL("expected a raise");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
    CHECK(std::string(e.what()).find("binary") != std::string::npos);
  }
}

TEST_CASE("config validation guards the numeric ranges") {
  PipelineConfig config;
  config.input_path = "in.csv";
  CHECK_NOTHROW(config.validate());
  config.split_ratio = 1.0;
  try {
    config.validate();
    FAIL("expected a raise");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
  config.split_ratio = 0.7;
  config.positive_threshold = -0.1;
  CHECK_THROWS_AS(config.validate(), Error);
  config.positive_threshold = 0.5;
  config.topics.topic_count = 0;
  CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("tree and forest models survive json serialization") {
  const features::EncodedDataset ds = random_dataset(150, 4, 3, 21);
  const Eigen::MatrixXd probes = random_probes(200, 4, 22);

  learn::DtConfig dt_config{6, 2};
  const learn::DecisionTreeModel tree = learn::train_decision_tree(ds, dt_config);
  const learn::DecisionTreeModel tree2 = tree_from_json(to_json(tree));
  learn::RfConfig rf_config;
  rf_config.n_trees = 8;
  const learn::RandomForestModel forest = learn::train_random_forest(ds, rf_config, 77);
  const learn::RandomForestModel forest2 = forest_from_json(to_json(forest));
  for (int i = 0; i < probes.rows(); ++i) {
    REQUIRE(learn::predict_tree(tree, probes.row(i)).label ==
            learn::predict_tree(tree2, probes.row(i)).label);
    REQUIRE(learn::predict_forest(forest, probes.row(i)).label ==
            learn::predict_forest(forest2, probes.row(i)).label);
  }
  CHECK(tree2.split_gain.isApprox(tree.split_gain));
}

TEST_CASE("boosted and linear models survive json serialization") {
  const features::EncodedDataset ds = random_dataset(150, 4, 2, 31);
  const Eigen::MatrixXd probes = random_probes(200, 4, 32);

  learn::GbtConfig gbt_config;
  gbt_config.n_rounds = 12;
  gbt_config.max_depth = 3;
  const learn::GbtModel gbt = learn::train_gbt(ds, gbt_config);
  const learn::GbtModel gbt2 = gbt_from_json(to_json(gbt));
  const learn::LinearModel lr = learn::train_logistic(ds, {40, 0.1, 1e-4});
  const learn::LinearModel lr2 = linear_from_json(to_json(lr));
  const learn::LinearModel svm = learn::train_linear_svm(ds, {1e-3, 4}, 9);
  const learn::LinearModel svm2 = linear_from_json(to_json(svm));
  CHECK(lr2.kind == learn::LinearKind::logistic);
  CHECK(svm2.kind == learn::LinearKind::svm);
  for (int i = 0; i < probes.rows(); ++i) {
    REQUIRE(learn::predict_gbt(gbt, probes.row(i)) ==
            doctest::Approx(learn::predict_gbt(gbt2, probes.row(i))).epsilon(1e-15));
    REQUIRE(learn::linear_score(lr, probes.row(i)) ==
            doctest::Approx(learn::linear_score(lr2, probes.row(i))).epsilon(1e-15));
    REQUIRE(learn::linear_score(svm, probes.row(i)) ==
            doctest::Approx(learn::linear_score(svm2, probes.row(i))).epsilon(1e-15));
  }
}

TEST_CASE("artifact files round trip with identical predictions") {
  const fs::path dir = scratch("artifact_roundtrip");
  synth::SynthSpec spec;
  spec.rows = 400;
  spec.seed = 3;
  const std::vector<ingest::ComplaintRecord> records = synth::synthetic_records(spec);

  const features::EncoderSet encoders = features::fit_encoders(records);
  const features::TaskSpec task = features::TaskSpec::timely();
  const features::EncodedDataset ds =
      features::build_features(records, task, encoders, date_origin());
  learn::GbtConfig gbt_config;
  gbt_config.n_rounds = 15;
  gbt_config.max_depth = 3;

  ModelArtifact artifact;
  artifact.task = task.task;
  artifact.model_kind = "gbt";
  artifact.model = to_json(learn::train_gbt(ds, gbt_config));
  artifact.encoders = encoders;
  artifact.class_names = task.class_names;
  artifact.date_origin = date_origin();
  artifact.seed = 3;
  artifact.train_rows = static_cast<std::size_t>(ds.rows());
  artifact.test_rows = 0;
  artifact.created = "2026-01-02T03:04:05Z";

  const fs::path path = dir / "model.json";
  save_model(artifact, path.string());
  const ModelArtifact loaded = load_model(path.string());
  CHECK(loaded.task == artifact.task);
  CHECK(loaded.model_kind == "gbt");
  CHECK(loaded.class_names == artifact.class_names);
  CHECK(loaded.date_origin == artifact.date_origin);
  CHECK(loaded.seed == 3);
  CHECK(loaded.train_rows == artifact.train_rows);
  CHECK(loaded.created == artifact.created);
  CHECK(loaded.encoders.at("company").table() == encoders.at("company").table());

  const auto before = predict_records(artifact, records);
  const auto after = predict_records(loaded, records);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    REQUIRE(before[i].label == after[i].label);
    REQUIRE(before[i].label_name == after[i].label_name);
    REQUIRE(before[i].probabilities == after[i].probabilities);
  }
}

TEST_CASE("artifact tampering is detected") {
  const fs::path dir = scratch("artifact_tamper");
  ModelArtifact artifact;
  artifact.task = features::Task::timely;
  artifact.model_kind = "lr";
  learn::LinearModel lr;
  lr.weights = Eigen::VectorXd::Constant(3, 0.25);
  lr.bias = -0.5;
  artifact.model = to_json(lr);
  artifact.class_names = {"No", "Yes"};
  artifact.date_origin = date_origin();
  artifact.created = "2026-01-01T00:00:00Z";
  const fs::path path = dir / "model.json";
  save_model(artifact, path.string());
  CHECK_NOTHROW(load_model(path.string()));

  const std::string original = slurp(path);

  SUBCASE("checksum mismatch") {
    const auto pos = original.find("\"checksum\": \"");
    REQUIRE(pos != std::string::npos);
    std::string tampered = original;
    char& digit = tampered[pos + 13];
    digit = digit == '0' ? '1' : '0';
    spit(path, tampered);
    try {
      load_model(path.string());
      FAIL("expected a raise");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::corrupt);
    }
  }

  SUBCASE("payload edited in place") {
    std::string tampered = original;
    const auto pos = tampered.find("-0.5");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 4, "-0.6");
    spit(path, tampered);
    CHECK_THROWS_AS(load_model(path.string()), Error);
  }

  SUBCASE("truncation") {
    spit(path, original.substr(0, original.size() / 2));
    try {
      load_model(path.string());
      FAIL("expected a raise");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::corrupt);
    }
  }

  SUBCASE("future format version wins over the checksum check") {
    auto doc = ordered_json::parse(original);
    doc["format_version"] = 2;
    spit(path, doc.dump(2));
    try {
      load_model(path.string());
      FAIL("expected a raise");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::version_unsupported);
    }
  }
}

TEST_CASE("synthetic generation is deterministic and parses cleanly") {
  const fs::path dir = scratch("synth");
  synth::SynthSpec spec;
  spec.rows = 800;
  spec.seed = 11;
  generate_synthetic(spec, (dir / "a.csv").string());
  generate_synthetic(spec, (dir / "b.csv").string());
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  spec.seed = 12;
  generate_synthetic(spec, (dir / "c.csv").string());
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));

  ingest::SchemaSpec schema = ingest::SchemaSpec::cfpb_default();
  schema.strict = true;
  const ingest::ReadResult result = ingest::read_file(dir / "a.csv", schema);
  CHECK(result.records.size() == 800);
  CHECK(result.errors.empty());
  std::size_t with_narrative = 0;
  for (const auto& record : result.records)
    if (!record.narrative.empty()) with_narrative++;
  CHECK(with_narrative > 0);
  CHECK(with_narrative < result.records.size());
}

TEST_CASE("pipeline end to end on a synthetic file") {
  const fs::path dir = scratch("pipeline");
  synth::SynthSpec spec;
  spec.rows = 1200;
  spec.seed = 8;
  const fs::path input = dir / "complaints.csv";
  generate_synthetic(spec, input.string());

  const PipelineConfig config = small_pipeline_config(input, dir / "out");
  const PipelineResult result = run_pipeline(config);
  const RunReport& report = result.report;

  CHECK(report.total_rows == 1200);
  CHECK(report.train_rows == static_cast<std::size_t>(0.7 * 1200));
  CHECK(report.train_rows + report.test_rows == report.total_rows);
  CHECK(report.encoder_fitted_rows == report.train_rows);
  REQUIRE(report.tasks.size() == 2);
  CHECK(report.tasks[0].models.size() == 3);
  CHECK(report.tasks[1].models.size() == 2);
  REQUIRE(report.topics.has_value());
  CHECK(report.topics->summaries.size() == 4);

  // Tree-family importances normalize to a distribution over the features.
  for (const TaskReport& task : report.tasks) {
    for (const ModelEvaluation& eval : task.models) {
      if (eval.importance.size() > 0)
        CHECK(eval.importance.sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(static_cast<std::size_t>(eval.confusion.total()) == task.test_rows);
    }
  }

  REQUIRE(result.artifact_paths.size() == 5);
  for (const std::string& path : result.artifact_paths) {
    CAPTURE(path);
    REQUIRE(fs::exists(path));
    CHECK_NOTHROW(load_model(path));
  }

  const std::string text = slurp(result.text_report_path);
  CHECK(text.find("Confusion matrix") != std::string::npos);
  CHECK(text.find("Topic 0") != std::string::npos);
  CHECK(text.find("gbt") != std::string::npos);

  // Re-running the same config and seed reproduces the machine report byte
  // for byte; wall times live only in the text form.
  const std::string machine_first = slurp(result.machine_report_path);
  const PipelineResult again = run_pipeline(config);
  CHECK(slurp(again.machine_report_path) == machine_first);
}

TEST_CASE("saved artifacts evaluate and predict on fresh records") {
  const fs::path dir = scratch("evaluate");
  synth::SynthSpec spec;
  spec.rows = 900;
  spec.seed = 21;
  const fs::path input = dir / "complaints.csv";
  generate_synthetic(spec, input.string());

  PipelineConfig config = small_pipeline_config(input, dir / "out");
  config.topics.enabled = false;
  config.response.enabled = false;
  config.timely.models = {"gbt"};
  const PipelineResult result = run_pipeline(config);
  REQUIRE(result.artifact_paths.size() == 1);
  const ModelArtifact artifact = load_model(result.artifact_paths[0]);

  ingest::SchemaSpec schema = ingest::SchemaSpec::cfpb_default();
  const auto records = ingest::read_file(input, schema).records;
  const ModelEvaluation eval = evaluate_artifact(artifact, records);
  CHECK(eval.model == "gbt");
  REQUIRE(eval.auc.has_value());
  CHECK(*eval.auc > 0.5);
  // Rows without a target cannot be scored and fall out of the confusion.
  long with_target = 0;
  for (const auto& record : records)
    if (record.timely_response != ingest::Timely::missing) with_target++;
  CHECK(eval.confusion.total() == with_target);

  const auto predictions = predict_records(artifact, records);
  REQUIRE(predictions.size() == records.size());
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(predictions[i].complaint_id == records[i].complaint_id);
    CHECK((predictions[i].label_name == "Yes" || predictions[i].label_name == "No"));
    REQUIRE(predictions[i].probabilities.size() == 2);
  }
}

TEST_CASE("machine report parses back into an identical rendering") {
  const fs::path dir = scratch("report_roundtrip");
  synth::SynthSpec spec;
  spec.rows = 600;
  spec.seed = 30;
  const fs::path input = dir / "complaints.csv";
  generate_synthetic(spec, input.string());

  const PipelineConfig config = small_pipeline_config(input, dir / "out");
  const PipelineResult result = run_pipeline(config);

  const std::string bytes = slurp(result.machine_report_path);
  const RunReport parsed = report_from_json(ordered_json::parse(bytes));
  CHECK(render_report(parsed, true) == bytes);
  CHECK_FALSE(render_report(parsed, false).empty());
}

TEST_CASE("dataset summary round trips through json") {
  synth::SynthSpec spec;
  spec.rows = 300;
  spec.seed = 40;
  const auto records = synth::synthetic_records(spec);
  const ingest::DatasetSummary summary = ingest::summarize(records);
  const ingest::DatasetSummary back = summary_from_json(summary_to_json(summary));
  CHECK(summary_to_json(back).dump() == summary_to_json(summary).dump());
}

TEST_CASE("a failing stage leaves no partial outputs behind") {
  const fs::path dir = scratch("cleanup");
  synth::SynthSpec spec;
  spec.rows = 300;
  spec.seed = 50;
  const fs::path input = dir / "complaints.csv";
  generate_synthetic(spec, input.string());

  PipelineConfig config = small_pipeline_config(input, dir / "out");
  config.topics.stopword_path = (dir / "missing_stopwords.txt").string();
  try {
    run_pipeline(config);
    FAIL("expected a raise");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io);
    CHECK(std::string(e.what()).find("topics") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "out" / "report.json"));
  CHECK_FALSE(fs::exists(dir / "out" / "report.txt"));
  std::size_t leftover_models = 0;
  if (fs::exists(dir / "out"))
    for (const auto& entry : fs::directory_iterator(dir / "out"))
      if (entry.path().filename().string().rfind("model_", 0) == 0) leftover_models++;
  CHECK(leftover_models == 0);
}
