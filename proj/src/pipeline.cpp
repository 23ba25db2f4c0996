#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <variant>

#include "finsight/error.hpp"
#include "finsight/metrics.hpp"
#include "finsight/pipeline.hpp"
#include "finsight/rng.hpp"
#include "finsight/topics.hpp"

namespace finsight::app {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Independent seed streams per stage so adding a model or task never shifts
// the randomness of the others.
constexpr std::uint64_t kSplitStream = 0;
constexpr std::uint64_t kResampleStreamBase = 10;  // + task index
constexpr std::uint64_t kModelStreamBase = 20;     // + task index * 10 + model position
constexpr std::uint64_t kTopicsStream = 40;

std::string iso_timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + " stage: " + e.detail());
  }
}

using AnyModel = std::variant<learn::DecisionTreeModel, learn::RandomForestModel, learn::GbtModel,
                              learn::LinearModel>;

AnyModel train_any(const std::string& kind, const features::EncodedDataset& dataset,
                   const learn::TrainConfig& config, std::uint64_t seed) {
  if (kind == "dt") return learn::train_decision_tree(dataset, config.dt);
  if (kind == "rf") return learn::train_random_forest(dataset, config.rf, seed);
  if (kind == "gbt") return learn::train_gbt(dataset, config.gbt);
  if (kind == "lr") return learn::train_logistic(dataset, config.lr);
  if (kind == "svm") return learn::train_linear_svm(dataset, config.svm, seed);
  raise(Errc::bad_config, "unknown model kind \"" + kind + "\"");
}

ordered_json any_to_json(const AnyModel& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

AnyModel any_from_json(const std::string& kind, const nlohmann::json& doc) {
  if (kind == "dt") return tree_from_json(doc);
  if (kind == "rf") return forest_from_json(doc);
  if (kind == "gbt") return gbt_from_json(doc);
  if (kind == "lr" || kind == "svm") return linear_from_json(doc);
  raise(Errc::corrupt, "artifact names an unknown model kind \"" + kind + "\"");
}

// Score used both for thresholding and for AUC on binary tasks. For the svm
// it is the raw margin; everything else yields a positive-class probability.
double binary_score(const AnyModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  struct Visitor {
    const Eigen::Ref<const Eigen::RowVectorXd>& x;
    double operator()(const learn::DecisionTreeModel& m) const {
      return learn::predict_tree(m, x).proba[1];
    }
    double operator()(const learn::RandomForestModel& m) const {
      return learn::predict_forest(m, x).proba[1];
    }
    double operator()(const learn::GbtModel& m) const { return learn::predict_gbt(m, x); }
    double operator()(const learn::LinearModel& m) const { return learn::linear_score(m, x); }
  };
  return std::visit(Visitor{x}, model);
}

bool is_svm(const AnyModel& model) {
  const auto* linear = std::get_if<learn::LinearModel>(&model);
  return linear != nullptr && linear->kind == learn::LinearKind::svm;
}

int predict_label(const AnyModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                  int num_classes, double threshold) {
  if (num_classes == 2) {
    if (is_svm(model)) return binary_score(model, x) >= 0.0 ? 1 : 0;
    return binary_score(model, x) >= threshold ? 1 : 0;
  }
  struct Visitor {
    const Eigen::Ref<const Eigen::RowVectorXd>& x;
    int operator()(const learn::DecisionTreeModel& m) const {
      return learn::predict_tree(m, x).label;
    }
    int operator()(const learn::RandomForestModel& m) const {
      return learn::predict_forest(m, x).label;
    }
    int operator()(const learn::GbtModel&) const {
      raise(Errc::not_binary, "gbt handles binary targets only");
    }
    int operator()(const learn::LinearModel&) const {
      raise(Errc::not_binary, "linear models handle binary targets only");
    }
  };
  return std::visit(Visitor{x}, model);
}

Eigen::VectorXd importance_of(const AnyModel& model) {
  struct Visitor {
    Eigen::VectorXd operator()(const learn::DecisionTreeModel& m) const {
      return learn::feature_importance(m);
    }
    Eigen::VectorXd operator()(const learn::RandomForestModel& m) const {
      return learn::feature_importance(m);
    }
    Eigen::VectorXd operator()(const learn::GbtModel& m) const {
      return learn::feature_importance(m);
    }
    Eigen::VectorXd operator()(const learn::LinearModel&) const { return Eigen::VectorXd(); }
  };
  return std::visit(Visitor{}, model);
}

ModelEvaluation evaluate_any(const AnyModel& model, const std::string& kind,
                             const features::EncodedDataset& test, double threshold) {
  const int num_classes = static_cast<int>(test.class_names.size());
  ModelEvaluation eval;
  eval.model = kind;

  Eigen::VectorXi predicted(test.rows());
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    predicted[i] = predict_label(model, test.matrix.row(i), num_classes, threshold);
  }
  eval.confusion = metrics::confusion_matrix(test.labels, predicted, num_classes,
                                             test.class_names);
  eval.per_class = metrics::per_class_metrics(eval.confusion);

  if (num_classes == 2) {
    const auto [precision, recall] = metrics::precision_recall(eval.confusion, 1);
    eval.precision = precision;
    eval.recall = recall;
    Eigen::VectorXd scores(test.rows());
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
      scores[i] = binary_score(model, test.matrix.row(i));
    }
    try {
      eval.auc = metrics::auc(test.labels, scores);
    } catch (const Error& e) {
      if (e.code() != Errc::one_class_only) throw;  // degenerate test slice: no AUC
    }
  } else {
    // Macro averages; the per-class table carries the detail.
    double precision_sum = 0.0;
    double recall_sum = 0.0;
    for (const auto& cls : eval.per_class) {
      precision_sum += cls.precision;
      recall_sum += cls.recall;
    }
    eval.precision = precision_sum / static_cast<double>(eval.per_class.size());
    eval.recall = recall_sum / static_cast<double>(eval.per_class.size());
  }
  eval.importance = importance_of(model);
  return eval;
}

std::vector<ingest::ComplaintRecord> gather(const std::vector<ingest::ComplaintRecord>& records,
                                            const std::vector<std::size_t>& rows) {
  std::vector<ingest::ComplaintRecord> out;
  out.reserve(rows.size());
  for (const std::size_t r : rows) out.push_back(records[r]);
  return out;
}

}  // namespace

Date date_origin() { return *parse_date("2011-12-01"); }

PipelineResult run_pipeline(const PipelineConfig& config) {
  stage("config", [&] { config.validate(); });

  ingest::SchemaSpec schema = stage("config", [&] {
    ingest::SchemaSpec s = config.schema_path.empty()
                               ? (config.format == ingest::SourceFormat::csv
                                      ? ingest::SchemaSpec::cfpb_default()
                                      : ingest::SchemaSpec::identity())
                               : ingest::SchemaSpec::load(config.schema_path);
    s.format = config.format;
    s.strict = config.strict;
    s.validate();
    return s;
  });

  const ingest::ReadResult input = stage("ingest", [&] {
    ingest::ReadResult result = ingest::read_file(config.input_path, schema);
    if (result.records.empty()) {
      raise(Errc::empty_dataset, "no usable rows in " + config.input_path);
    }
    return result;
  });
  const std::vector<ingest::ComplaintRecord>& records = input.records;

  RunReport report;
  report.config_echo = to_json(config);
  report.dataset = input.summary;
  report.total_rows = records.size();

  const features::SplitIndices split = stage("split", [&] {
    return features::train_test_split(records.size(), config.split_ratio,
                                      derive_seed(config.seed, kSplitStream));
  });
  const std::vector<ingest::ComplaintRecord> train_records = gather(records, split.train);
  const std::vector<ingest::ComplaintRecord> test_records = gather(records, split.test);
  report.train_rows = train_records.size();
  report.test_rows = test_records.size();

  const features::EncoderSet encoders =
      stage("encode", [&] { return features::fit_encoders(train_records); });
  report.encoder_fitted_rows = encoders.empty() ? 0 : encoders.begin()->second.fitted_on();

  PipelineResult result;
  std::vector<fs::path> written;
  const fs::path out_dir(config.out_dir);

  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) raise(Errc::io, "cannot create output directory " + config.out_dir);

    const Date origin = date_origin();
    const std::vector<std::pair<const TaskStageConfig*, features::Task>> stages = {
        {&config.timely, features::Task::timely},
        {&config.response, features::Task::response},
    };
    for (std::size_t task_index = 0; task_index < stages.size(); ++task_index) {
      const TaskStageConfig& task_config = *stages[task_index].first;
      if (!task_config.enabled) continue;
      const features::Task task = stages[task_index].second;
      const features::TaskSpec spec = features::TaskSpec::for_task(task);
      const char* task_name = features::to_string(task);

      const features::EncodedDataset train_ds = stage("encode", [&] {
        return features::build_features(train_records, spec, encoders, origin);
      });
      const features::EncodedDataset test_ds = stage("encode", [&] {
        return features::build_features(test_records, spec, encoders, origin);
      });
      if (train_ds.rows() == 0 || test_ds.rows() == 0) {
        raise(Errc::empty_dataset, std::string("task ") + task_name +
                                       ": no rows with a target on one split side");
      }

      const std::vector<std::size_t> resampled_rows = stage("resample", [&] {
        return features::apply_resampling(
            train_ds.labels, task_config.resampling,
            derive_seed(config.seed, kResampleStreamBase + task_index));
      });
      const features::EncodedDataset fit_ds = features::take_rows(train_ds, resampled_rows);

      TaskReport task_report;
      task_report.task = task;
      task_report.class_names = spec.class_names;
      task_report.feature_names = spec.feature_names;
      task_report.resampling = features::to_string(task_config.resampling.policy);
      task_report.train_rows = static_cast<std::size_t>(train_ds.rows());
      task_report.resampled_rows = static_cast<std::size_t>(fit_ds.rows());
      task_report.test_rows = static_cast<std::size_t>(test_ds.rows());
      task_report.dropped_train = train_ds.dropped_missing_target;
      task_report.dropped_test = test_ds.dropped_missing_target;

      for (std::size_t m = 0; m < task_config.models.size(); ++m) {
        const std::string& kind = task_config.models[m];
        const std::uint64_t model_seed =
            derive_seed(config.seed, kModelStreamBase + task_index * 10 + m);

        const auto t0 = std::chrono::steady_clock::now();
        const AnyModel model = stage("train", [&] {
          return train_any(kind, fit_ds, config.train, model_seed);
        });
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;

        ModelEvaluation eval = stage("evaluate", [&] {
          return evaluate_any(model, kind, test_ds, config.positive_threshold);
        });
        eval.wall_seconds = wall.count();

        stage("artifact", [&] {
          ModelArtifact artifact;
          artifact.task = task;
          artifact.model_kind = kind;
          artifact.model = any_to_json(model);
          artifact.encoders = encoders;
          artifact.class_names = spec.class_names;
          artifact.date_origin = origin;
          artifact.seed = config.seed;
          artifact.train_rows = static_cast<std::size_t>(fit_ds.rows());
          artifact.test_rows = static_cast<std::size_t>(test_ds.rows());
          artifact.created = iso_timestamp_utc();
          const fs::path path = out_dir / ("model_" + std::string(task_name) + "_" + kind +
                                           ".json");
          save_model(artifact, path.string());
          written.push_back(path);
          result.artifact_paths.push_back(path.string());
        });
        task_report.models.push_back(std::move(eval));
      }
      report.tasks.push_back(std::move(task_report));
    }

    if (config.topics.enabled) {
      stage("topics", [&] {
        report.topics = run_topics_stage(records, config.topics, config.seed);
      });
    }

    stage("report", [&] {
      const fs::path text_path = out_dir / "report.txt";
      const fs::path machine_path = out_dir / "report.json";
      {
        std::ofstream out(text_path, std::ios::binary);
        if (!out) raise(Errc::io, "cannot write " + text_path.string());
        out << render_report(report, false);
      }
      written.push_back(text_path);
      {
        std::ofstream out(machine_path, std::ios::binary);
        if (!out) raise(Errc::io, "cannot write " + machine_path.string());
        out << render_report(report, true);
      }
      written.push_back(machine_path);
      result.text_report_path = text_path.string();
      result.machine_report_path = machine_path.string();
    });
  } catch (...) {
    for (const fs::path& path : written) {
      std::error_code ec;
      fs::remove(path, ec);
    }
    throw;
  }

  result.report = std::move(report);
  return result;
}

std::optional<TopicsReport> run_topics_stage(
    const std::vector<ingest::ComplaintRecord>& records,
    const TopicsStageConfig& config, std::uint64_t seed) {
  topics::TokenizerRules rules =
      config.stopword_path.empty()
          ? topics::default_rules()
          : topics::TokenizerRules{topics::load_stopwords(config.stopword_path), 3, true};
  std::vector<std::vector<std::string>> token_lists;
  for (const ingest::ComplaintRecord& record : records) {
    if (!record.narrative.empty()) {
      token_lists.push_back(topics::tokenize(record.narrative, rules));
    }
  }
  if (token_lists.empty()) return std::nullopt;

  const topics::Corpus corpus = topics::build_corpus(
      token_lists, config.min_df, config.max_df_fraction, config.max_vocab);
  const topics::TopicModel model =
      topics::fit_lda(corpus, config.lda(derive_seed(seed, kTopicsStream)));

  TopicsReport report;
  report.documents = corpus.doc_count();
  report.vocabulary = static_cast<std::size_t>(corpus.vocabulary.size());
  report.tokens = corpus.total_tokens;
  report.perplexity = topics::perplexity(model, corpus);
  report.log_likelihood = model.log_likelihood;
  for (int k = 0; k < model.topic_count(); ++k) {
    TopicSummary summary;
    summary.topic = k;
    summary.token_share = static_cast<double>(model.topic_total[k]) /
                          static_cast<double>(corpus.total_tokens);
    summary.words = topics::top_words(model, k, config.top_words);
    report.summaries.push_back(std::move(summary));
  }
  return report;
}

ModelEvaluation evaluate_artifact(const ModelArtifact& artifact,
                                  const std::vector<ingest::ComplaintRecord>& records,
                                  double positive_threshold) {
  const features::TaskSpec spec = features::TaskSpec::for_task(artifact.task);
  const features::EncodedDataset dataset =
      features::build_features(records, spec, artifact.encoders, artifact.date_origin);
  if (dataset.rows() == 0) {
    raise(Errc::empty_dataset, "no rows with a target to evaluate");
  }
  const AnyModel model = any_from_json(artifact.model_kind, artifact.model);
  return evaluate_any(model, artifact.model_kind, dataset, positive_threshold);
}

std::vector<Prediction> predict_records(const ModelArtifact& artifact,
                                        const std::vector<ingest::ComplaintRecord>& records,
                                        double positive_threshold) {
  const features::TaskSpec spec = features::TaskSpec::for_task(artifact.task);
  const AnyModel model = any_from_json(artifact.model_kind, artifact.model);
  const int num_classes = static_cast<int>(artifact.class_names.size());
  const bool binary = num_classes == 2;

  std::vector<Prediction> out;
  out.reserve(records.size());
  for (const ingest::ComplaintRecord& record : records) {
    const Eigen::RowVectorXd x =
        features::encode_record(record, spec, artifact.encoders, artifact.date_origin);
    Prediction prediction;
    prediction.complaint_id = record.complaint_id;
    prediction.label = predict_label(model, x, num_classes, positive_threshold);
    prediction.label_name = artifact.class_names[static_cast<std::size_t>(prediction.label)];
    if (binary) {
      if (!is_svm(model)) {
        const double p = binary_score(model, x);
        prediction.probabilities = {1.0 - p, p};
      }
    } else if (const auto* tree = std::get_if<learn::DecisionTreeModel>(&model)) {
      const auto proba = learn::predict_tree(*tree, x).proba;
      prediction.probabilities.assign(proba.data(), proba.data() + proba.size());
    } else if (const auto* forest = std::get_if<learn::RandomForestModel>(&model)) {
      const auto proba = learn::predict_forest(*forest, x).proba;
      prediction.probabilities.assign(proba.data(), proba.data() + proba.size());
    }
    out.push_back(std::move(prediction));
  }
  return out;
}

}  // namespace finsight::app
