#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "finsight/features.hpp"
#include "finsight/ingest.hpp"
#include "finsight/metrics.hpp"

namespace finsight::app {

struct ModelEvaluation {
  std::string model;  // dt | rf | gbt | lr | svm
  metrics::ConfusionMatrix confusion;
  metrics::PerClassMetrics per_class;
  double precision = 0.0;  // binary tasks: the positive class
  double recall = 0.0;
  std::optional<double> auc;  // binary tasks only
  Eigen::VectorXd importance;  // tree-based models; empty otherwise
  double wall_seconds = 0.0;   // text rendering only, kept out of the machine form
};

struct TaskReport {
  features::Task task = features::Task::timely;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
  std::string resampling;
  std::size_t train_rows = 0;      // after dropping missing targets
  std::size_t resampled_rows = 0;  // after the resampling policy
  std::size_t test_rows = 0;
  std::size_t dropped_train = 0;  // missing-target rows dropped per side
  std::size_t dropped_test = 0;
  std::vector<ModelEvaluation> models;
};

struct TopicSummary {
  int topic = 0;
  double token_share = 0.0;  // fraction of corpus tokens assigned to the topic
  std::vector<std::pair<std::string, double>> words;
};

struct TopicsReport {
  std::size_t documents = 0;
  std::size_t vocabulary = 0;
  std::size_t tokens = 0;
  double perplexity = 0.0;
  double log_likelihood = 0.0;
  std::vector<TopicSummary> summaries;
};

struct RunReport {
  nlohmann::ordered_json config_echo;
  ingest::DatasetSummary dataset;
  std::size_t total_rows = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t encoder_fitted_rows = 0;  // equals train_rows when nothing leaks
  std::vector<TaskReport> tasks;
  std::optional<TopicsReport> topics;  // absent when the stage is disabled
};

nlohmann::ordered_json summary_to_json(const ingest::DatasetSummary& summary);
ingest::DatasetSummary summary_from_json(const nlohmann::ordered_json& doc);

std::string render_summary_text(const ingest::DatasetSummary& summary);

nlohmann::ordered_json evaluation_to_json(const ModelEvaluation& eval,
                                          const std::vector<std::string>& feature_names);

// One model's metrics as a standalone block (the evaluate subcommand).
std::string render_evaluation_text(const ModelEvaluation& eval,
                                   const std::vector<std::string>& feature_names);

nlohmann::ordered_json topics_to_json(const TopicsReport& topics);
std::string render_topics_text(const TopicsReport& topics);

// Aligned tables: binary tasks as metric rows by model columns, multiclass
// tasks as category rows with precision/recall per model, then confusion
// matrices, importances, and "Topic k" listings. Includes wall times.
std::string render_report_text(const RunReport& report);

// Stable keys, no wall times, no timestamps: byte-identical across runs with
// the same config and seed.
nlohmann::ordered_json render_report_machine(const RunReport& report);

std::string render_report(const RunReport& report, bool machine);

// Inverse of render_report_machine, close enough to re-render: wall times are
// not stored in the machine form and come back as zero. Takes the ordered
// parse so the config echo keeps its key order.
RunReport report_from_json(const nlohmann::ordered_json& doc);

}  // namespace finsight::app
